use std::path::Path;

use serde::{Deserialize, Serialize};

use super::scheme::{decrypt_bit, encrypt_with_indices, keygen, LweParams, PublicKey};
use crate::error::{Error, Result};
use crate::io::{read_json, write_json};
use crate::seed::rng_for;

/// One encrypted bit together with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LweTestCase {
    pub phi: u8,
    pub decrypt_value: u64,
    pub u: u64,
    pub v: u64,
    pub a_samples: Vec<u64>,
    pub b_samples: Vec<u64>,
    pub q: u64,
    pub s: u64,
    pub m: usize,
    pub n_samples: usize,
    pub public_a: Vec<u64>,
    pub public_b: Vec<u64>,
    pub seed: u64,
}

impl LweTestCase {
    /// Reservoir input `[A_samples, B_samples, φ]` without the dummy.
    pub fn message(&self) -> Vec<f64> {
        self.a_samples
            .iter()
            .chain(&self.b_samples)
            .map(|&x| x as f64)
            .chain(std::iter::once(self.phi as f64))
            .collect()
    }
}

/// `[A_samples, B_samples, φ, D]` with the dummy `D = 0`.
pub fn build_input_buffer(case: &LweTestCase) -> Vec<f64> {
    let mut buf = case.message();
    buf.push(0.0);
    buf
}

/// Candidates drawn per requested case before giving up.
pub const ATTEMPT_FACTOR: usize = 10;

/// Generate `n_cases` round-trip-correct encryptions.
///
/// Each candidate draws its own key and one subset of key indices, and
/// encrypts both bits over that subset. A candidate is kept only when both
/// bits decrypt correctly; it then contributes the φ = 0 and φ = 1 records.
/// Candidate `i` uses a seed derived from `(seed, i)`.
pub fn generate_testcases(params: &LweParams, n_cases: usize, seed: u64) -> Result<Vec<LweTestCase>> {
    params.validate()?;
    if n_cases == 0 {
        return Err(Error::invalid("n_cases", "must be >= 1"));
    }
    let budget = ATTEMPT_FACTOR * n_cases;
    let mut out = Vec::with_capacity(n_cases + 1);
    let mut retained = 0;
    let mut attempts = 0;
    while out.len() < n_cases {
        if attempts == budget {
            return Err(Error::Generation {
                attempts,
                retained,
                rate: retained as f64 / attempts as f64,
            });
        }
        let case_seed = crate::seed::derive_seed(seed, &[attempts as u64]);
        let mut rng = rng_for(seed, &[attempts as u64]);
        attempts += 1;
        let pk = keygen(params, &mut rng)?;
        let k: Vec<usize> = rand::seq::index::sample(&mut rng, params.m, params.n_samples)
            .into_iter()
            .map(|i| i + 1)
            .collect();
        let pair: Vec<LweTestCase> = [0u8, 1]
            .into_iter()
            .map(|phi| make_case(params, &pk, &k, phi, case_seed))
            .collect();
        if pair.iter().all(|c| decrypt_bit(c.u, c.v, c.s, c.q).1 == c.phi) {
            retained += 1;
            out.extend(pair);
        }
    }
    out.truncate(n_cases);
    Ok(out)
}

fn make_case(params: &LweParams, pk: &PublicKey, k: &[usize], phi: u8, seed: u64) -> LweTestCase {
    let c = encrypt_with_indices(pk, phi, k, params.q);
    LweTestCase {
        phi,
        decrypt_value: decrypt_bit(c.u, c.v, params.s, params.q).0,
        u: c.u,
        v: c.v,
        a_samples: k.iter().map(|&i| pk.a[i - 1]).collect(),
        b_samples: k.iter().map(|&i| pk.b[i - 1]).collect(),
        q: params.q,
        s: params.s,
        m: params.m,
        n_samples: params.n_samples,
        public_a: pk.a.clone(),
        public_b: pk.b.clone(),
        seed,
    }
}

/// Public half of a key file; the secret is stored separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyFile {
    pub params: LweParams,
    pub public_a: Vec<u64>,
    pub public_b: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretFile {
    pub s: u64,
}

pub fn save_dataset(cases: &[LweTestCase], path: &Path) -> Result<()> {
    write_json(path, &cases)
}

pub fn load_dataset(path: &Path) -> Result<Vec<LweTestCase>> {
    read_json(path)
}

/// Write `<stem>.json` with the public key and `<stem>.secret.json` with `s`.
pub fn save_key(params: &LweParams, pk: &PublicKey, dir: &Path, stem: &str) -> Result<()> {
    let mut public = params.clone();
    public.s = 0;
    write_json(
        &dir.join(format!("{stem}.json")),
        &KeyFile {
            params: public,
            public_a: pk.a.clone(),
            public_b: pk.b.clone(),
        },
    )?;
    write_json(&dir.join(format!("{stem}.secret.json")), &SecretFile { s: params.s })
}
