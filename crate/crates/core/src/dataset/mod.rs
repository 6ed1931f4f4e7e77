//! Multilabel manifests, the genre table, and the sampling plan (stratified
//! test split plus one balanced one-vs-all training subset per genre).

mod genres;
mod manifest;
pub mod reference;
mod split;

pub use genres::{GenreTable, EXCLUDED_GENRES, REFERENCE_GENRES, REFERENCE_TRACK_COUNT};
pub use manifest::{
    genre_counts, load_manifest, manifest_csv, parse_manifest, sha256_hex, LabelMatrix, ManifestLoad, TrackRecord,
    MAX_SUBGENRES,
};
pub use split::{ova_balanced_subset, stratified_test_split, BalancedSubset, SplitPlan, TestSplit};
