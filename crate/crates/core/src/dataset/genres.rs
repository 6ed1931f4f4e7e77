use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// The sixteen retained broad genres with their song counts, largest first.
pub const REFERENCE_GENRES: [(&str, usize); 16] = [
    ("Hip-Hop", 5641),
    ("Electronic", 4680),
    ("Rock", 4356),
    ("Pop", 2758),
    ("Psychedelia", 1367),
    ("Metal", 1153),
    ("Dance", 960),
    ("Punk", 804),
    ("R&B", 801),
    ("Industrial & Noise", 788),
    ("Experimental", 694),
    ("Ambient", 687),
    ("Folk", 652),
    ("Classical Music", 608),
    ("Singer-Songwriter", 474),
    ("Jazz", 278),
];

/// Distinct tracks in the reference corpus (tracks may carry several genres).
pub const REFERENCE_TRACK_COUNT: usize = 18_019;

/// Broad genres that are never retained even when a table lists them.
pub const EXCLUDED_GENRES: [&str; 1] = ["Regional Music"];

pub const MAX_GENRES_PER_SUBGENRE: usize = 2;

fn key(s: &str) -> String {
    s.trim().to_lowercase()
}

/// Subgenre → broad-genre mapping plus the ordered list of retained genres.
#[derive(Debug, Clone, PartialEq)]
pub struct GenreTable {
    entries: BTreeMap<String, Vec<String>>,
    retained: Vec<String>,
}

impl GenreTable {
    /// Build from `(subgenre, genres)` pairs. Retained genres are the distinct
    /// broad genres in first-appearance order, minus [`EXCLUDED_GENRES`].
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut map = BTreeMap::new();
        let mut retained: Vec<String> = Vec::new();
        for (sub, genres) in entries {
            let sub = sub.as_ref().trim();
            if sub.is_empty() {
                return Err(Error::Validation("empty subgenre name".into()));
            }
            if genres.is_empty() || genres.len() > MAX_GENRES_PER_SUBGENRE {
                return Err(Error::Validation(format!(
                    "subgenre {sub:?} maps to {} genres; allowed 1..={MAX_GENRES_PER_SUBGENRE}",
                    genres.len()
                )));
            }
            let mut names = Vec::with_capacity(genres.len());
            for g in &genres {
                let name = canonical_genre(g.as_ref());
                if name.is_empty() || name.contains(';') {
                    return Err(Error::Validation(format!("invalid genre name {name:?}")));
                }
                let excluded = EXCLUDED_GENRES.iter().any(|e| key(e) == key(&name));
                if !excluded && !retained.iter().any(|r| key(r) == key(&name)) {
                    retained.push(name.clone());
                }
                names.push(name);
            }
            if map.insert(key(sub), names).is_some() {
                return Err(Error::Validation(format!("subgenre {sub:?} listed twice")));
            }
        }
        Ok(Self { entries: map, retained })
    }

    /// A table covering the sixteen reference genres: one same-named
    /// subgenre per genre plus a few cross-genre subgenres.
    pub fn reference() -> Self {
        let mut entries: Vec<(String, Vec<String>)> = REFERENCE_GENRES
            .iter()
            .map(|(g, _)| (reference_subgenre(g), vec![(*g).to_string()]))
            .collect();
        for (sub, a, b) in [
            ("electro-industrial", "Electronic", "Industrial & Noise"),
            ("trip hop", "Hip-Hop", "Electronic"),
            ("jazz rap", "Hip-Hop", "Jazz"),
            ("psychedelic rock", "Psychedelia", "Rock"),
            ("dance-pop", "Dance", "Pop"),
            ("dark ambient", "Ambient", "Industrial & Noise"),
            ("contemporary folk", "Folk", "Singer-Songwriter"),
            ("regional mexican", "Regional Music", "Folk"),
        ] {
            entries.push((sub.to_string(), vec![a.to_string(), b.to_string()]));
        }
        Self::new(entries).expect("reference table is well formed")
    }

    /// Parse `subgenre,genre1[,genre2]` CSV (header row required).
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(format!("genre table row {}: {e}", line + 2)))?;
            let mut fields = record.iter().filter(|f| !f.is_empty());
            let sub = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("genre table row {} is empty", line + 2)))?;
            entries.push((sub.to_string(), fields.map(str::to_string).collect()));
        }
        Self::new(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("subgenre,genre1,genre2\n");
        for (sub, genres) in &self.entries {
            out.push_str(&csv_field(sub));
            for g in genres {
                out.push(',');
                out.push_str(&csv_field(g));
            }
            out.push('\n');
        }
        out
    }

    /// Restrict (and reorder) the retained genres.
    pub fn with_retained(mut self, retained: &[&str]) -> Result<Self> {
        let known: Vec<String> = self.entries.values().flatten().cloned().collect();
        let mut list = Vec::with_capacity(retained.len());
        for r in retained {
            let found = known
                .iter()
                .find(|k| key(k) == key(r))
                .ok_or_else(|| Error::Validation(format!("genre {r:?} is not in the table")))?;
            list.push(found.clone());
        }
        self.retained = list;
        Ok(self)
    }

    pub fn retained(&self) -> &[String] {
        &self.retained
    }

    pub fn genre_index(&self, name: &str) -> Option<usize> {
        self.retained.iter().position(|g| key(g) == key(name))
    }

    /// Broad genres (retained or not) for a subgenre tag.
    pub fn lookup(&self, subgenre: &str) -> Option<&[String]> {
        self.entries.get(&key(subgenre)).map(Vec::as_slice)
    }

    pub fn subgenres(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// True when the retained list is exactly the sixteen reference genres in order.
    pub fn has_reference_layout(&self) -> bool {
        self.retained.len() == REFERENCE_GENRES.len()
            && self
                .retained
                .iter()
                .zip(REFERENCE_GENRES.iter())
                .all(|(a, (b, _))| a == b)
    }
}

fn canonical_genre(name: &str) -> String {
    let name = name.trim();
    REFERENCE_GENRES
        .iter()
        .map(|(g, _)| *g)
        .chain(EXCLUDED_GENRES)
        .find(|g| key(g) == key(name))
        .map_or_else(|| name.to_string(), str::to_string)
}

pub(crate) fn reference_subgenre(genre: &str) -> String {
    key(genre)
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_table_shape() {
        let t = GenreTable::reference();
        assert_eq!(t.retained().len(), 16);
        assert!(t.has_reference_layout());
        assert_eq!(t.retained()[0], "Hip-Hop");
        assert_eq!(t.retained()[15], "Jazz");
        assert_eq!(
            t.lookup("Electro-Industrial").unwrap(),
            &["Electronic".to_string(), "Industrial & Noise".to_string()]
        );
        assert!(t.genre_index("regional music").is_none());
    }

    #[test]
    fn csv_roundtrip_and_canonical_names() {
        let t = GenreTable::from_csv_str("subgenre,genre1,genre2\nelectro-industrial,electronic,industrial & noise\nbebop,jazz\n").unwrap();
        assert_eq!(t.retained(), &["Electronic", "Industrial & Noise", "Jazz"]);
        let again = GenreTable::from_csv_str(&t.to_csv_string()).unwrap();
        assert_eq!(again.lookup("bebop").unwrap(), &["Jazz".to_string()]);
    }

    #[test]
    fn too_many_genres_per_subgenre() {
        let err = GenreTable::from_csv_str("subgenre,genre1,genre2\nx,a,b,c\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(GenreTable::from_csv_str("subgenre,genre1\nx,a\nX,b\n").is_err());
    }

    #[test]
    fn retained_override() {
        let t = GenreTable::reference().with_retained(&["jazz", "Rock"]).unwrap();
        assert_eq!(t.retained(), &["Jazz", "Rock"]);
        assert!(GenreTable::reference().with_retained(&["Polka"]).is_err());
    }
}
