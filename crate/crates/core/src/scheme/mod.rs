//! X-secure, T-private retrieval over an in-process fleet of servers.

mod certify;
mod instance;
mod params;
mod protocol;
pub mod wire;

pub use certify::{certify_instance, noise_containment, CertificationReport, CodeCertificate};
pub use instance::{Manifest, SchemeInstance};
pub use params::{default_m, SchemeParams};
pub use protocol::{
    answer_all, encode_storage, encode_storage_with, make_queries, make_queries_with,
    random_files, reconstruct, run_retrieval, server_answer, Noise, QueryBundle, StorageShares,
    Transcript,
};
