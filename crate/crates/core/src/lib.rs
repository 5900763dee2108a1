//! Clustering points sampled near two line segments by building a 3-uniform
//! hypergraph of nearly collinear triples and splitting its co-incidence
//! matrix spectrally.
//!
//! ```
//! use linecluster::{cluster, ham_star, sample_glmm, CrossParams};
//!
//! let params = CrossParams { sigma: 0.0, n_points: 60, seed: 3, ..Default::default() };
//! let data = sample_glmm(&params.to_model().unwrap()).unwrap();
//! let fit = cluster(&data.points, 1e-6, 3).unwrap();
//! assert_eq!(ham_star(&fit.labels, &data.labels).unwrap(), 0);
//! ```

pub mod bounds;
pub mod diagnostics;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod linalg;
pub mod lines;
pub mod mc;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod point;
pub mod quadrature;
pub mod rng;
pub mod spectral;
pub mod threshold;
pub mod tls;

pub use bounds::{expected_similarity, BoundInputs, ExpectedSimilarity};
pub use diagnostics::{davis_kahan, kmeans_bound, DavisKahanReport, KMeansBoundReport};
pub use error::{Error, Result};
pub use hypergraph::{build_similarity, build_similarity_with, BuildOptions, HyperedgeStats, SimilarityMatrix};
pub use lines::{recover_lines, LineEstimate};
pub use metrics::{ham_star, report, RecoveryReport};
pub use model::{sample_glmm, standard_cross, CrossParams, Label, LabeledDataset, LineSegment, ModelParams};
pub use oracle::{mle_recover, perr_exact, ErrorReport, MixtureDensity};
pub use point::Point;
pub use spectral::{cluster, cluster_similarity, top2_eigen, ClusterResult, SpectralEmbedding};
pub use threshold::{autocluster, select_threshold, AutoClusterResult, ThresholdChoice, TripleSample};
pub use tls::{sigma_tls, sigma_tls_sq, Triple};
