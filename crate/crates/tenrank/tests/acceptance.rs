//! Full acceptance corpus: every shipped guarantee is exercised at desk
//! scale and printed as one pass/fail line.

#[test]
fn acceptance_corpus() {
    let results = tenrank::acceptance::run_all(false);
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.pass).collect();
    assert!(
        failed.is_empty(),
        "{} acceptance criteria failed: {:?}",
        failed.len(),
        failed.iter().map(|r| r.id).collect::<Vec<_>>()
    );
}
