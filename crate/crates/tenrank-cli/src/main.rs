//! Command-line front end: state generation, rank/persistence/border
//! certification, degeneration and rate verification, and the selftest
//! corpus. Reports are JSON on stdout with stable ordering; exit code 0
//! on success, 1 on a verification failure, 2 on usage errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tenrank::decomp::verify_decomposition;
use tenrank::degen::{
    border_rank_certificate, canonical_chain_maps, eps_decomposition, ghz,
    ghz_degeneration_from_eps, transport_eps_decomposition, verify_degeneration, ChainStep,
    EpsFamily, EpsLocalMap,
};
use tenrank::digest::{digest_any, digest_tensor};
use tenrank::families::{make_state, recognize, Family, FamilySpec};
use tenrank::json::{
    border_certificate_json, decomposition_from_str,
    degeneration_certificate_json, local_map_from_str, persistence_certificate_json,
    rank_certificate_json, tensor_from_str, tensor_to_string, AnyDecomposition, AnyTensor,
};
use tenrank::persistence::{
    decide_persistence_qubits, ghz_kron_cert, pyramid_persistence, screen_persistence,
    ProductMode, QubitDecision, ScreenOutcome,
};
use tenrank::pipeline::family_rank_cert;
use tenrank::rates::{rate_one_certificate, schmidt_profile, RateOutcome, DEFAULT_ARITY_CAP};
use tenrank::scalar::{parse_rational, Ring};

#[derive(Parser)]
#[command(name = "tenrank", version, about = "Exact tensor-rank certification for multiqudit state families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named family state as canonical tensor JSON.
    GenState(GenStateArgs),
    /// Certify the tensor rank of a recognized family state or of an
    /// arbitrary tensor with supplied witnesses.
    RankCert(RankCertArgs),
    /// Verify a decomposition against a tensor.
    VerifyDecomp(VerifyDecompArgs),
    /// Persistence certification.
    Persist(PersistArgs),
    /// Verify a degeneration, either a canonical chain step or explicit
    /// files.
    Degen(DegenArgs),
    /// Border-rank certificate from the built-in epsilon decompositions.
    Border(BorderArgs),
    /// Rate-one certificate between named families.
    Rate(RateArgs),
    /// Exact rank of the product of a diagonal tensor with a
    /// minimal-rank persistent family state.
    KronCert(KronCertArgs),
    /// Run the acceptance corpus.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct GenStateArgs {
    /// ghz | w | dicke | l | m | mprime | n | nprime | y | nonsym4
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    n: usize,
    /// Excitation count (dicke only).
    #[arg(long)]
    excitations: Option<usize>,
    /// Rational literals (nonsym4 only).
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// plus | minus (nonsym4 only).
    #[arg(long, default_value = "plus")]
    sign: String,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RankCertArgs {
    /// Tensor JSON file.
    tensor: PathBuf,
    /// Decomposition JSON giving an upper bound for unrecognized
    /// tensors.
    #[arg(long)]
    decomp: Option<PathBuf>,
    /// Attempt the staircase persistence lower bound for unrecognized
    /// tensors.
    #[arg(long)]
    pyramid: bool,
}

#[derive(Args)]
struct VerifyDecompArgs {
    #[arg(long)]
    tensor: PathBuf,
    #[arg(long)]
    decomp: PathBuf,
}

#[derive(Args)]
struct PersistArgs {
    tensor: PathBuf,
    /// auto | pyramid | qubit | screen
    #[arg(long, default_value = "auto")]
    method: String,
    #[arg(long, default_value_t = 16)]
    trials: usize,
}

#[derive(Args)]
struct DegenArgs {
    /// l-to-m | m-to-n | ghz-to-l | ghz-to-n (canonical maps).
    #[arg(long)]
    step: Option<String>,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Explicit mode: source tensor file.
    #[arg(long)]
    source: Option<PathBuf>,
    /// Explicit mode: target tensor file.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Explicit mode: epsilon local map file.
    #[arg(long)]
    maps: Option<PathBuf>,
}

#[derive(Args)]
struct BorderArgs {
    /// l | mprime | nprime | m | n | ghz
    #[arg(long)]
    family: String,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct RateArgs {
    /// ghz | l | m
    #[arg(long)]
    source: String,
    /// l | m | n
    #[arg(long)]
    target: String,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct KronCertArgs {
    /// Size of the diagonal factor.
    #[arg(long)]
    d: usize,
    /// w | wsquare | l | m | n
    #[arg(long)]
    family: String,
    /// Local dimension of the persistent factor (ignored for w and
    /// wsquare).
    #[arg(long, default_value_t = 3)]
    d2: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Mode::Kron)]
    mode: Mode,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Kron,
    Tensor,
}

#[derive(Args)]
struct SelftestArgs {
    /// Run the reduced grids.
    #[arg(long)]
    quick: bool,
}

fn read_tensor(path: &PathBuf) -> Result<AnyTensor> {
    let body = std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    Ok(tensor_from_str(&body)?)
}

fn family_spec_from_args(
    family: &str,
    d: usize,
    n: usize,
    excitations: Option<usize>,
    alpha: Option<&str>,
    beta: Option<&str>,
    sign: &str,
) -> Result<FamilySpec> {
    let family = Family::from_name(family)
        .ok_or_else(|| anyhow!("unknown family {family:?}"))?;
    let mut spec = FamilySpec::new(family, d, n);
    match family {
        Family::W | Family::Dicke | Family::NonSym4 => spec.d = 2,
        Family::Y => spec.d = 3,
        _ => {}
    }
    if family == Family::Dicke {
        spec.excitations = Some(excitations.ok_or_else(|| anyhow!("dicke needs --excitations"))?);
    }
    if family == Family::NonSym4 {
        spec.n = 4;
        spec.alpha = Some(parse_rational(alpha.ok_or_else(|| anyhow!("nonsym4 needs --alpha"))?)?);
        spec.beta = Some(parse_rational(beta.ok_or_else(|| anyhow!("nonsym4 needs --beta"))?)?);
        spec.plus_sign = match sign {
            "plus" | "+" => true,
            "minus" | "-" => false,
            other => bail!("sign must be plus or minus, got {other:?}"),
        };
    }
    Ok(spec)
}

fn report(command: &str, started: Instant, body: Value) -> Value {
    json!({
        "format": 1,
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_ms": started.elapsed().as_millis() as u64,
        "report": body,
    })
}

fn emit(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serialization"));
}

/// Ok(true) = success exit 0, Ok(false) = verification failure exit 1.
fn dispatch(cli: Cli) -> Result<bool> {
    let started = Instant::now();
    match cli.command {
        Command::GenState(args) => {
            let spec = family_spec_from_args(
                &args.family,
                args.d,
                args.n,
                args.excitations,
                args.alpha.as_deref(),
                args.beta.as_deref(),
                &args.sign,
            )?;
            let t = make_state(&spec)?;
            let body = tensor_to_string(&AnyTensor::Cyc(t));
            match args.output {
                Some(path) => {
                    let mut f = std::fs::File::create(&path)
                        .with_context(|| format!("creating {path:?}"))?;
                    f.write_all(body.as_bytes())?;
                    f.write_all(b"\n")?;
                    eprintln!("wrote {path:?}");
                }
                None => println!("{body}"),
            }
            Ok(true)
        }
        Command::RankCert(args) => {
            let any = read_tensor(&args.tensor)?;
            let t = any.as_cyc()?.clone();
            if let Some(spec) = recognize(&t) {
                let cert = family_rank_cert(&spec)?;
                emit(&report(
                    "rank-cert",
                    started,
                    json!({
                        "recognized_family": spec.family.name(),
                        "d": spec.d,
                        "n": spec.n,
                        "certificate": rank_certificate_json(&cert),
                    }),
                ));
                return Ok(true);
            }
            if args.decomp.is_none() && !args.pyramid {
                bail!(
                    "tensor not recognized as a named family; supply --decomp and/or --pyramid \
                     (heuristics are never applied silently)"
                );
            }
            let mut lower_cert = None;
            if args.pyramid {
                let persist = pyramid_persistence(&t)?;
                lower_cert = Some(tenrank::persistence::persistent_lower_bound(&t, &persist)?);
            }
            let mut cert = match lower_cert {
                Some(c) => c,
                None => tenrank::persistence::flattening_rank_certificate(&t)?,
            };
            if let Some(path) = args.decomp {
                let body = std::fs::read_to_string(&path)?;
                match decomposition_from_str(&body)? {
                    AnyDecomposition::Cyc(dec) => {
                        cert = cert.attach_upper(&t, dec)?;
                    }
                    AnyDecomposition::Eps(_) => {
                        bail!("rank certificates need an epsilon-free decomposition")
                    }
                }
            }
            emit(&report(
                "rank-cert",
                started,
                json!({
                    "recognized_family": Value::Null,
                    "certificate": rank_certificate_json(&cert),
                }),
            ));
            Ok(true)
        }
        Command::VerifyDecomp(args) => {
            let t = read_tensor(&args.tensor)?;
            let body = std::fs::read_to_string(&args.decomp)?;
            let dec = decomposition_from_str(&body)?;
            let (ok, terms) = match (&t, &dec) {
                (AnyTensor::Cyc(t), AnyDecomposition::Cyc(d)) => {
                    (verify_decomposition(t, d)?, d.len())
                }
                (AnyTensor::Eps(t), AnyDecomposition::Eps(d)) => {
                    (verify_decomposition(t, d)?, d.len())
                }
                (AnyTensor::Cyc(t), AnyDecomposition::Eps(d)) => {
                    (verify_decomposition(&t.to_eps(), d)?, d.len())
                }
                (AnyTensor::Eps(_), AnyDecomposition::Cyc(_)) => {
                    bail!("cannot verify a cyclotomic decomposition against an epsilon tensor")
                }
            };
            emit(&report(
                "verify-decomp",
                started,
                json!({
                    "subject": digest_any(&t),
                    "verified": ok,
                    "rank_upper_bound": if ok { Some(terms) } else { None },
                }),
            ));
            Ok(ok)
        }
        Command::Persist(args) => {
            let t = read_tensor(&args.tensor)?.as_cyc()?.clone();
            let qubit_capable =
                t.shape().dims().iter().all(|&d| d == 2) && (2..=4).contains(&t.arity());
            let seed = std::env::var("TENRANK_SEED")
                .ok()
                .and_then(|s| s.parse::<u64>().ok())
                .unwrap_or(0);
            let method = args.method.as_str();
            let body = match method {
                "pyramid" | "auto" => match pyramid_persistence(&t) {
                    Ok(cert) => json!({
                        "outcome": "persistent",
                        "certificate": persistence_certificate_json(&cert),
                    }),
                    Err(e) if method == "pyramid" => json!({
                        "outcome": "not_applicable",
                        "reason": e.to_string(),
                    }),
                    Err(_) if qubit_capable => qubit_persist_json(&t)?,
                    Err(_) => screen_json(&t, args.trials, seed),
                },
                "qubit" => {
                    if !qubit_capable {
                        bail!("the exact decision needs a qubit tensor of arity 2..=4");
                    }
                    qubit_persist_json(&t)?
                }
                "screen" => screen_json(&t, args.trials, seed),
                other => bail!("unknown method {other:?}"),
            };
            let conclusive_negative = body["outcome"] == "not_persistent";
            emit(&report("persist", started, body));
            Ok(!conclusive_negative)
        }
        Command::Degen(args) => {
            let (src, maps, tgt, label): (_, EpsLocalMap, _, String) =
                match (&args.step, &args.source, &args.target, &args.maps) {
                    (Some(step), None, None, None) => {
                        let (d, n) = (args.d, args.n);
                        match step.as_str() {
                            "l-to-m" => (
                                make_state(&FamilySpec::l(d, n))?,
                                canonical_chain_maps(ChainStep::LToM, d, n)?,
                                make_state(&FamilySpec::m(d, n))?,
                                format!("l-to-m d={d} n={n}"),
                            ),
                            "m-to-n" => (
                                make_state(&FamilySpec::m(d, n))?,
                                canonical_chain_maps(ChainStep::MToN, d, n)?,
                                make_state(&FamilySpec::n_state(d, n))?,
                                format!("m-to-n d={d} n={n}"),
                            ),
                            "ghz-to-l" => (
                                ghz(d, n),
                                ghz_degeneration_from_eps(&eps_decomposition(EpsFamily::L, d, n)?)?,
                                make_state(&FamilySpec::l(d, n))?,
                                format!("ghz-to-l d={d} n={n}"),
                            ),
                            "ghz-to-n" => {
                                let g_to_l =
                                    ghz_degeneration_from_eps(&eps_decomposition(EpsFamily::L, d, n)?)?;
                                let chain = g_to_l
                                    .then(&canonical_chain_maps(ChainStep::LToM, d, n)?)?
                                    .then(&canonical_chain_maps(ChainStep::MToN, d, n)?)?;
                                (
                                    ghz(d, n),
                                    chain,
                                    make_state(&FamilySpec::n_state(d, n))?,
                                    format!("ghz-to-n d={d} n={n}"),
                                )
                            }
                            other => bail!("unknown step {other:?}"),
                        }
                    }
                    (None, Some(s), Some(t), Some(m)) => {
                        let src = read_tensor(s)?.as_cyc()?.clone();
                        let tgt = read_tensor(t)?.as_cyc()?.clone();
                        let maps = local_map_from_str(&std::fs::read_to_string(m)?)?;
                        (src, maps, tgt, "explicit files".into())
                    }
                    _ => bail!("use either --step or all of --source/--target/--maps"),
                };
            match verify_degeneration(&src, &maps, &tgt) {
                Ok(out) => {
                    emit(&report(
                        "degen",
                        started,
                        json!({
                            "case": label,
                            "certificate": degeneration_certificate_json(&out.certificate),
                            "error_orders": out.error_terms.iter().map(|(l, _)| *l).collect::<Vec<_>>(),
                        }),
                    ));
                    Ok(true)
                }
                Err(e) => {
                    emit(&report(
                        "degen",
                        started,
                        json!({ "case": label, "verified": false, "reason": e.to_string() }),
                    ));
                    Ok(false)
                }
            }
        }
        Command::Border(args) => {
            let (d, n) = (args.d, args.n);
            let (target, dec, transported) = match args.family.as_str() {
                "l" => (make_state(&FamilySpec::l(d, n))?, eps_decomposition(EpsFamily::L, d, n)?, false),
                "mprime" => (
                    make_state(&FamilySpec::m_prime(d, n))?,
                    eps_decomposition(EpsFamily::MPrime, d, n)?,
                    false,
                ),
                "nprime" => (
                    make_state(&FamilySpec::n_prime(d, n))?,
                    eps_decomposition(EpsFamily::NPrime, d, n)?,
                    false,
                ),
                "m" => {
                    let base = eps_decomposition(EpsFamily::L, d, n)?;
                    let maps = canonical_chain_maps(ChainStep::LToM, d, n)?;
                    (
                        make_state(&FamilySpec::m(d, n))?,
                        transport_eps_decomposition(&base, &maps)?,
                        true,
                    )
                }
                "n" => {
                    let base = eps_decomposition(EpsFamily::L, d, n)?;
                    let to_m = canonical_chain_maps(ChainStep::LToM, d, n)?;
                    let to_n = canonical_chain_maps(ChainStep::MToN, d, n)?;
                    let dec = transport_eps_decomposition(
                        &transport_eps_decomposition(&base, &to_m)?,
                        &to_n,
                    )?;
                    (make_state(&FamilySpec::n_state(d, n))?, dec, true)
                }
                "ghz" => (
                    ghz(d, n),
                    tenrank::decomp::decompose_ghz(d, n)?.to_eps(),
                    false,
                ),
                other => bail!("unknown border family {other:?}"),
            };
            let cert = border_rank_certificate(&target, &dec)?;
            // the diagonal tensor of the same size degenerates onto the
            // subject through these very terms
            let ghz_maps = ghz_degeneration_from_eps(&dec)?;
            let ghz_check = verify_degeneration(&ghz(dec.len(), n), &ghz_maps, &target)?;
            emit(&report(
                "border",
                started,
                json!({
                    "family": args.family,
                    "d": d,
                    "n": n,
                    "transported": transported,
                    "certificate": border_certificate_json(&cert),
                    "ghz_degeneration": degeneration_certificate_json(&ghz_check.certificate),
                }),
            ));
            Ok(cert.exact().is_some())
        }
        Command::Rate(args) => {
            let (d, n) = (args.d, args.n);
            let state = |name: &str| -> Result<tenrank::tensor::Tensor<tenrank::scalar::Cyclotomic>> {
                Ok(match name {
                    "ghz" => ghz(d, n),
                    "l" => make_state(&FamilySpec::l(d, n))?,
                    "m" => make_state(&FamilySpec::m(d, n))?,
                    "n" => make_state(&FamilySpec::n_state(d, n))?,
                    other => bail!("unknown rate family {other:?}"),
                })
            };
            let src = state(&args.source)?;
            let tgt = state(&args.target)?;
            let l_to_m = canonical_chain_maps(ChainStep::LToM, d, n)?;
            let m_to_n = canonical_chain_maps(ChainStep::MToN, d, n)?;
            let g_to_l = ghz_degeneration_from_eps(&eps_decomposition(EpsFamily::L, d, n)?)?;
            let maps = match (args.source.as_str(), args.target.as_str()) {
                ("l", "m") => l_to_m,
                ("m", "n") => m_to_n,
                ("l", "n") => l_to_m.then(&m_to_n)?,
                ("ghz", "l") => g_to_l,
                ("ghz", "m") => g_to_l.then(&l_to_m)?,
                ("ghz", "n") => g_to_l.then(&l_to_m)?.then(&m_to_n)?,
                (s, t) => bail!("no canonical maps for {s} -> {t}"),
            };
            let profile_src = schmidt_profile(&src, DEFAULT_ARITY_CAP)?;
            let profile_tgt = schmidt_profile(&tgt, DEFAULT_ARITY_CAP)?;
            match rate_one_certificate(&src, &tgt, &maps)? {
                RateOutcome::RateOne { trace } => {
                    emit(&report(
                        "rate",
                        started,
                        json!({
                            "source": args.source,
                            "target": args.target,
                            "d": d,
                            "n": n,
                            "outcome": "rate_one",
                            "source_schmidt_ranks": profile_src.values().collect::<Vec<_>>(),
                            "target_schmidt_ranks": profile_tgt.values().collect::<Vec<_>>(),
                            "trace": trace,
                        }),
                    ));
                    Ok(true)
                }
                RateOutcome::Inconclusive { trace } => {
                    emit(&report(
                        "rate",
                        started,
                        json!({
                            "source": args.source,
                            "target": args.target,
                            "outcome": "inconclusive",
                            "trace": trace,
                        }),
                    ));
                    Ok(false)
                }
            }
        }
        Command::KronCert(args) => {
            let n = args.n;
            let spec = match args.family.as_str() {
                "w" => FamilySpec::w(n),
                "wsquare" => FamilySpec::m(4, n),
                "l" => FamilySpec::l(args.d2, n),
                "m" => FamilySpec::m(args.d2, n),
                "n" => FamilySpec::n_state(args.d2, n),
                other => bail!("unknown kron-cert family {other:?}"),
            };
            let p = make_state(&spec)?;
            let p_cert = family_rank_cert(&spec)?;
            let mode = match args.mode {
                Mode::Kron => ProductMode::Kron,
                Mode::Tensor => ProductMode::Tensor,
            };
            let cert = ghz_kron_cert(&p, &p_cert, args.d, mode)?;
            emit(&report(
                "kron-cert",
                started,
                json!({
                    "diagonal_size": args.d,
                    "factor_family": spec.family.name(),
                    "factor_d": spec.d,
                    "n": n,
                    "mode": match mode { ProductMode::Kron => "kron", ProductMode::Tensor => "tensor" },
                    "factor_certificate": rank_certificate_json(&p_cert),
                    "certificate": rank_certificate_json(&cert),
                }),
            ));
            Ok(cert.exact().is_some())
        }
        Command::Selftest(args) => {
            let results = tenrank::acceptance::run_all(args.quick);
            for r in &results {
                eprintln!("{}", r.line());
            }
            let all_pass = results.iter().all(|r| r.pass);
            emit(&report(
                "selftest",
                started,
                json!({
                    "quick": args.quick,
                    "criteria": results.iter().map(|r| json!({
                        "id": r.id,
                        "name": r.name,
                        "pass": r.pass,
                        "detail": r.detail,
                    })).collect::<Vec<_>>(),
                    "all_pass": all_pass,
                }),
            ));
            Ok(all_pass)
        }
    }
}

fn qubit_persist_json(t: &tenrank::tensor::Tensor<tenrank::scalar::Cyclotomic>) -> Result<Value> {
    Ok(match decide_persistence_qubits(t)? {
        QubitDecision::Persistent { certificate, witnesses } => json!({
            "outcome": "persistent",
            "witnesses": witnesses
                .iter()
                .map(|w| w.iter().map(|c| c.literal()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "certificate": persistence_certificate_json(&certificate),
        }),
        QubitDecision::NotPersistent { trace } => json!({
            "outcome": "not_persistent",
            "trace": trace,
        }),
    })
}

fn screen_json(
    t: &tenrank::tensor::Tensor<tenrank::scalar::Cyclotomic>,
    trials: usize,
    seed: u64,
) -> Value {
    match screen_persistence(t, trials, seed) {
        ScreenOutcome::LikelyPersistent { witness, samples } => json!({
            "outcome": "likely_persistent",
            "conclusive": false,
            "witness_basis_index": witness,
            "samples": samples,
            "subject": digest_tensor(t),
        }),
        ScreenOutcome::Inconclusive { trace } => json!({
            "outcome": "inconclusive",
            "conclusive": false,
            "trace": trace,
        }),
        ScreenOutcome::NotPersistentEvidence { trace } => json!({
            "outcome": "not_persistent_evidence",
            "conclusive": false,
            "trace": trace,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
