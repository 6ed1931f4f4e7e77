use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::genres::{csv_field, GenreTable};
use crate::error::{Error, Result};

/// Upper bound on subgenre tags per track.
pub const MAX_SUBGENRES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub track_id: String,
    pub audio_path: PathBuf,
    pub subgenres: Vec<String>,
    /// Indices into the table's retained genres, ascending.
    pub genres: Vec<usize>,
}

/// Binary tracks × genres matrix, row order = manifest order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatrix {
    genres: Vec<String>,
    n_rows: usize,
    cells: Vec<bool>,
}

impl LabelMatrix {
    pub fn new(genres: Vec<String>, rows: &[Vec<usize>]) -> Result<Self> {
        let g = genres.len();
        let mut cells = vec![false; rows.len() * g];
        for (r, labels) in rows.iter().enumerate() {
            for &c in labels {
                if c >= g {
                    return Err(Error::Shape(format!("genre index {c} out of range for {g} genres")));
                }
                cells[r * g + c] = true;
            }
        }
        Ok(Self {
            genres,
            n_rows: rows.len(),
            cells,
        })
    }

    pub fn from_dense(genres: Vec<String>, dense: &[Vec<bool>]) -> Result<Self> {
        let g = genres.len();
        if let Some(bad) = dense.iter().position(|r| r.len() != g) {
            return Err(Error::Shape(format!("row {bad} does not have {g} columns")));
        }
        Ok(Self {
            genres,
            n_rows: dense.len(),
            cells: dense.concat(),
        })
    }

    pub fn genres(&self) -> &[String] {
        &self.genres
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_genres(&self) -> usize {
        self.genres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn get(&self, row: usize, genre: usize) -> bool {
        self.cells[row * self.genres.len() + genre]
    }

    pub fn row(&self, row: usize) -> &[bool] {
        let g = self.genres.len();
        &self.cells[row * g..(row + 1) * g]
    }

    /// Genre indices set on a row.
    pub fn row_genres(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(row).iter().enumerate().filter(|(_, &b)| b).map(|(g, _)| g)
    }

    pub fn column_count(&self, genre: usize) -> usize {
        (0..self.n_rows).filter(|&r| self.get(r, genre)).count()
    }

    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.genres.len()];
        for r in 0..self.n_rows {
            for g in self.row_genres(r) {
                counts[g] += 1;
            }
        }
        counts
    }
}

/// Column sums in retained-genre order.
pub fn genre_counts(labels: &LabelMatrix) -> Vec<(String, usize)> {
    labels
        .genres()
        .iter()
        .cloned()
        .zip(labels.column_counts())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestLoad {
    pub tracks: Vec<TrackRecord>,
    pub labels: LabelMatrix,
    /// Track ids whose tags resolve to no retained genre.
    pub dropped: Vec<String>,
    /// SHA-256 of the manifest bytes.
    pub checksum: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load_manifest(path: impl AsRef<Path>, table: &GenreTable) -> Result<ManifestLoad> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text, table)
}

/// Parse `track_id,audio_path,subgenres` CSV; subgenres are `;`-separated.
pub fn parse_manifest(text: &str, table: &GenreTable) -> Result<ManifestLoad> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("manifest header: {e}")))?
        .clone();
    let expected = ["track_id", "audio_path", "subgenres"];
    if !text.trim().is_empty() && headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse(format!(
            "manifest header must be {}, found {:?}",
            expected.join(","),
            headers.iter().collect::<Vec<_>>()
        )));
    }

    let mut seen = HashSet::new();
    let mut tracks = Vec::new();
    let mut dropped = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("manifest row {}: {e}", line + 2)))?;
        let track_id = record[0].to_string();
        if track_id.is_empty() {
            return Err(Error::Validation(format!("manifest row {} has an empty track id", line + 2)));
        }
        if !seen.insert(track_id.clone()) {
            return Err(Error::DuplicateTrack(track_id));
        }
        let subgenres: Vec<String> = record[2]
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if subgenres.is_empty() || subgenres.len() > MAX_SUBGENRES {
            return Err(Error::Validation(format!(
                "track {track_id} has {} subgenre tags; allowed 1..={MAX_SUBGENRES}",
                subgenres.len()
            )));
        }
        let mut genres = Vec::new();
        for tag in &subgenres {
            let broad = table.lookup(tag).ok_or_else(|| Error::UnknownSubgenre {
                track_id: track_id.clone(),
                tag: tag.clone(),
            })?;
            genres.extend(broad.iter().filter_map(|g| table.genre_index(g)));
        }
        genres.sort_unstable();
        genres.dedup();
        if genres.is_empty() {
            dropped.push(track_id);
            continue;
        }
        tracks.push(TrackRecord {
            track_id,
            audio_path: PathBuf::from(&record[1]),
            subgenres,
            genres,
        });
    }

    let rows: Vec<Vec<usize>> = tracks.iter().map(|t| t.genres.clone()).collect();
    let labels = LabelMatrix::new(table.retained().to_vec(), &rows)?;
    Ok(ManifestLoad {
        tracks,
        labels,
        dropped,
        checksum: sha256_hex(text.as_bytes()),
    })
}

/// Serialize manifest rows with the `track_id,audio_path,subgenres` header.
pub fn manifest_csv<'a>(rows: impl IntoIterator<Item = (&'a str, &'a Path, &'a [String])>) -> String {
    let mut out = String::from("track_id,audio_path,subgenres\n");
    for (id, path, subs) in rows {
        out.push_str(&csv_field(id));
        out.push(',');
        out.push_str(&csv_field(&path.to_string_lossy()));
        out.push(',');
        out.push_str(&csv_field(&subs.join(";")));
        out.push('\n');
    }
    out
}
