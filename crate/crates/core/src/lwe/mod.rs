//! Scalar-secret Learning-with-Errors cryptosystem used as the application
//! task: key generation, single-bit encryption and decryption, and filtered
//! test-case generation.

pub mod dataset;
pub mod scheme;

pub use dataset::{
    build_input_buffer, generate_testcases, load_dataset, save_dataset, save_key, KeyFile, LweTestCase, SecretFile,
};
pub use scheme::{
    decrypt_bit, encrypt_bit, encrypt_samples, encrypt_with_indices, error_sample, gaussian_density, gaussian_sigma,
    input_size, keygen, lwe_sample, multibit_decrypt, multibit_encrypt, Ciphertext, ErrorMode, LweParams, PublicKey,
};
