//! A synthetic label layout that reproduces the published per-genre counts.
//!
//! Only the column sums are known for the reference corpus, so the joint
//! structure here is one valid construction: genre label slots are dealt
//! round-robin across the 18 019 tracks, which gives every track one or two
//! genres and never gives a track the same genre twice.

use std::path::PathBuf;

use super::genres::{reference_subgenre, REFERENCE_GENRES, REFERENCE_TRACK_COUNT};
use super::manifest::{manifest_csv, LabelMatrix};

/// Deal `counts[g]` slots of each genre over `n_tracks` tracks in order.
/// Requires `max(counts) <= n_tracks <= sum(counts)` for distinct,
/// non-empty rows.
pub fn deal_labels(counts: &[usize], n_tracks: usize) -> Vec<Vec<usize>> {
    let mut rows = vec![Vec::new(); n_tracks];
    if n_tracks == 0 {
        return rows;
    }
    let mut slot = 0usize;
    for (g, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            rows[slot % n_tracks].push(g);
            slot += 1;
        }
    }
    rows
}

pub fn reference_label_rows() -> Vec<Vec<usize>> {
    let counts: Vec<usize> = REFERENCE_GENRES.iter().map(|(_, c)| *c).collect();
    deal_labels(&counts, REFERENCE_TRACK_COUNT)
}

pub fn reference_label_matrix() -> LabelMatrix {
    let genres = REFERENCE_GENRES.iter().map(|(g, _)| (*g).to_string()).collect();
    LabelMatrix::new(genres, &reference_label_rows()).expect("indices are in range")
}

/// Manifest CSV for the reference layout, tagged with the per-genre
/// subgenres of [`GenreTable::reference`](super::GenreTable::reference).
pub fn reference_manifest_csv() -> String {
    let rows = reference_label_rows();
    let records: Vec<(String, PathBuf, Vec<String>)> = rows
        .iter()
        .enumerate()
        .map(|(i, genres)| {
            let subs = genres
                .iter()
                .map(|&g| reference_subgenre(REFERENCE_GENRES[g].0))
                .collect();
            (format!("ref{i:05}"), PathBuf::from(format!("ref{i:05}.wav")), subs)
        })
        .collect();
    manifest_csv(records.iter().map(|(id, p, s)| (id.as_str(), p.as_path(), s.as_slice())))
}
