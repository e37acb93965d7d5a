//! Subject digests: certificates refer to the tensors they were issued
//! for by the SHA-256 of the canonical tensor JSON.

use sha2::{Digest, Sha256};

use crate::json::{cyc_tensor_to_string, tensor_to_string, AnyTensor};
use crate::scalar::Cyclotomic;
use crate::tensor::Tensor;

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_tensor(t: &Tensor<Cyclotomic>) -> String {
    digest_bytes(cyc_tensor_to_string(t).as_bytes())
}

pub fn digest_any(t: &AnyTensor) -> String {
    digest_bytes(tensor_to_string(t).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_state, FamilySpec};

    #[test]
    fn digests_separate_tensors() {
        let a = digest_tensor(&make_state(&FamilySpec::w(3)).unwrap());
        let b = digest_tensor(&make_state(&FamilySpec::w(4)).unwrap());
        assert_ne!(a, b);
        let again = digest_tensor(&make_state(&FamilySpec::w(3)).unwrap());
        assert_eq!(a, again);
        assert_eq!(a.len(), 64);
    }
}
