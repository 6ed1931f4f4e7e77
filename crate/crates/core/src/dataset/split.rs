use std::fmt::Write as _;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::manifest::LabelMatrix;
use crate::error::{Error, Result};
use crate::rng::{seeded, sub_seed};

/// Test/train partition of the label matrix rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSplit {
    pub test: Vec<usize>,
    pub train_pool: Vec<usize>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Fold {
    Test,
    Train,
}

const MICRO: i64 = 1_000_000;

/// Per-genre deviation bookkeeping for the split.
struct Needs {
    desired_test: Vec<i64>,
    /// `fraction * positives` in millionths of a track.
    exact_test: Vec<i64>,
    test_count: Vec<i64>,
    train_count: Vec<i64>,
    positives: Vec<i64>,
    target_total: i64,
    total_test: i64,
}

impl Needs {
    fn need(&self, g: usize, fold: Fold) -> i64 {
        match fold {
            Fold::Test => self.desired_test[g] - self.test_count[g],
            Fold::Train => (self.positives[g] - self.desired_test[g]) - self.train_count[g],
        }
    }

    fn total_need(&self, fold: Fold, n_rows: i64) -> i64 {
        match fold {
            Fold::Test => self.target_total - self.total_test,
            Fold::Train => (n_rows - self.target_total) - (n_rows - self.total_test),
        }
    }

    fn add(&mut self, labels: &LabelMatrix, row: usize, fold: Fold, sign: i64) {
        for g in labels.row_genres(row) {
            match fold {
                Fold::Test => self.test_count[g] += sign,
                Fold::Train => self.train_count[g] += sign,
            }
        }
        if fold == Fold::Test {
            self.total_test += sign;
        }
    }

    /// Distance of genre `g`'s test count from its exact share, in millionths.
    fn exact_gap(&self, g: usize) -> i64 {
        self.test_count[g] * MICRO - self.exact_test[g]
    }

    /// Lexicographic cost: (excess beyond one track of the exact share,
    /// squared deviation from the rounded quota, total deviation).
    fn cost(&self) -> (i64, i64, i64) {
        let mut excess = 0;
        let mut sq = 0;
        for (g, (d, t)) in self.desired_test.iter().zip(&self.test_count).enumerate() {
            let dev = t - d;
            excess += (self.exact_gap(g).abs() - MICRO).max(0);
            sq += dev * dev;
        }
        (excess, sq, (self.total_test - self.target_total).abs())
    }
}

/// Multilabel iterative stratification into a test set holding `fraction`
/// of every genre's positives, each within one track of the exact share.
///
/// Genres are processed from rarest to most common; each of a genre's
/// unassigned tracks goes to the fold that is further below its quota for
/// that genre, then to the fold with the larger overall shortfall, then by
/// a seeded coin. A greedy repair pass moves or swaps tracks until every
/// genre is within one track of its exact share. Tracks carrying a genre with
/// fewer than two positives stay in the training pool.
pub fn stratified_test_split(labels: &LabelMatrix, fraction: f64, seed: u64) -> Result<TestSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Domain(format!("split fraction {fraction} must lie in (0, 1)")));
    }
    let n = labels.n_rows();
    let n_genres = labels.n_genres();
    let mut rng = seeded(sub_seed(seed, "test-split"));
    let positives: Vec<i64> = labels.column_counts().iter().map(|&c| c as i64).collect();
    let mut warnings = Vec::new();

    let degenerate: Vec<bool> = positives.iter().map(|&p| p < 2).collect();
    for (g, &p) in positives.iter().enumerate() {
        if p < 2 {
            warnings.push(format!(
                "genre {} has {p} positive(s); kept entirely in the training pool",
                labels.genres()[g]
            ));
        }
    }
    let desired_test: Vec<i64> = positives
        .iter()
        .zip(&degenerate)
        .map(|(&p, &d)| if d { 0 } else { (p as f64 * fraction).round() as i64 })
        .collect();
    let exact_test = positives
        .iter()
        .zip(&degenerate)
        .map(|(&p, &d)| if d { 0 } else { (p as f64 * fraction * MICRO as f64).round() as i64 })
        .collect();
    let mut needs = Needs {
        desired_test,
        exact_test,
        test_count: vec![0; n_genres],
        train_count: vec![0; n_genres],
        positives: positives.clone(),
        target_total: (n as f64 * fraction).round() as i64,
        total_test: 0,
    };

    let mut fold: Vec<Option<Fold>> = vec![None; n];
    let mut pinned = vec![false; n];
    for r in 0..n {
        if labels.row_genres(r).any(|g| degenerate[g]) {
            pinned[r] = true;
            fold[r] = Some(Fold::Train);
            needs.add(labels, r, Fold::Train, 1);
        }
    }

    let mut remaining: Vec<usize> = (0..n_genres)
        .map(|g| (0..n).filter(|&r| fold[r].is_none() && labels.get(r, g)).count())
        .collect();
    loop {
        let Some(g) = (0..n_genres)
            .filter(|&g| remaining[g] > 0)
            .min_by_key(|&g| (remaining[g], g))
        else {
            break;
        };
        let mut rows: Vec<usize> = (0..n).filter(|&r| fold[r].is_none() && labels.get(r, g)).collect();
        rows.shuffle(&mut rng);
        for r in rows {
            let (nt, nr) = (needs.need(g, Fold::Test), needs.need(g, Fold::Train));
            let choice = if nt != nr {
                if nt > nr { Fold::Test } else { Fold::Train }
            } else {
                let (tt, tr) = (needs.total_need(Fold::Test, n as i64), needs.total_need(Fold::Train, n as i64));
                if tt != tr {
                    if tt > tr { Fold::Test } else { Fold::Train }
                } else if rng.random_bool(0.5) {
                    Fold::Test
                } else {
                    Fold::Train
                }
            };
            fold[r] = Some(choice);
            needs.add(labels, r, choice, 1);
            for h in labels.row_genres(r) {
                remaining[h] -= 1;
            }
        }
    }
    // rows without any genre follow the overall quota
    for r in 0..n {
        if fold[r].is_none() {
            let choice = if needs.total_need(Fold::Test, n as i64) > 0 { Fold::Test } else { Fold::Train };
            fold[r] = Some(choice);
            needs.add(labels, r, choice, 1);
        }
    }

    let mut fold: Vec<Fold> = fold.into_iter().map(|f| f.expect("all rows assigned")).collect();
    repair(labels, &mut fold, &pinned, &mut needs);
    let (excess, _, _) = needs.cost();
    if excess > 0 {
        warnings.push(format!(
            "stratification could not bring every genre within one sample of its quota (excess {excess})"
        ));
    }

    let test = (0..n).filter(|&r| fold[r] == Fold::Test).collect();
    let train_pool = (0..n).filter(|&r| fold[r] == Fold::Train).collect();
    Ok(TestSplit {
        test,
        train_pool,
        warnings,
    })
}

fn flip(f: Fold) -> Fold {
    match f {
        Fold::Test => Fold::Train,
        Fold::Train => Fold::Test,
    }
}

fn repair(labels: &LabelMatrix, fold: &mut [Fold], pinned: &[bool], needs: &mut Needs) {
    let n = fold.len();
    let max_rounds = 4 * n + 16;
    for _ in 0..max_rounds {
        let current = needs.cost();
        if current.0 == 0 {
            return;
        }
        // worst offending genre
        let g = (0..labels.n_genres())
            .max_by_key(|&g| (needs.exact_gap(g).abs(), std::cmp::Reverse(g)))
            .expect("at least one genre when excess > 0");
        let too_many = needs.exact_gap(g) > 0;
        // rows of genre g on the side that has too many
        let from = if too_many { Fold::Test } else { Fold::Train };
        let movers: Vec<usize> = (0..n)
            .filter(|&r| !pinned[r] && fold[r] == from && labels.get(r, g))
            .collect();
        let partners: Vec<usize> = (0..n)
            .filter(|&r| !pinned[r] && fold[r] == flip(from) && !labels.get(r, g))
            .collect();

        let mut best: Option<((i64, i64, i64), usize, Option<usize>)> = None;
        for &a in &movers {
            needs.add(labels, a, from, -1);
            needs.add(labels, a, flip(from), 1);
            let c = needs.cost();
            if c < current && best.is_none_or(|(bc, _, _)| c < bc) {
                best = Some((c, a, None));
            }
            for &b in &partners {
                needs.add(labels, b, flip(from), -1);
                needs.add(labels, b, from, 1);
                let c = needs.cost();
                if c < current && best.is_none_or(|(bc, _, _)| c < bc) {
                    best = Some((c, a, Some(b)));
                }
                needs.add(labels, b, from, -1);
                needs.add(labels, b, flip(from), 1);
            }
            needs.add(labels, a, flip(from), -1);
            needs.add(labels, a, from, 1);
        }

        let Some((_, a, b)) = best else {
            return;
        };
        needs.add(labels, a, from, -1);
        needs.add(labels, a, flip(from), 1);
        fold[a] = flip(from);
        if let Some(b) = b {
            needs.add(labels, b, flip(from), -1);
            needs.add(labels, b, from, 1);
            fold[b] = from;
        }
    }
}

/// One genre's balanced training subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedSubset {
    pub genre: String,
    /// Sorted row indices (positives and sampled negatives).
    pub indices: Vec<usize>,
    pub positives: usize,
    pub negatives: usize,
    pub warning: Option<String>,
}

/// All training-pool positives of `genre` plus an equally sized negative
/// sample. Negatives are stratified by their primary genre (the rarest
/// genre they carry) with largest-remainder quotas, so every other genre
/// keeps its share among the chosen negatives.
pub fn ova_balanced_subset(
    labels: &LabelMatrix,
    genre: usize,
    train_pool: &[usize],
    seed: u64,
) -> Result<BalancedSubset> {
    let n_genres = labels.n_genres();
    if genre >= n_genres {
        return Err(Error::Validation(format!("genre index {genre} out of range")));
    }
    let name = labels.genres()[genre].clone();
    let (pos, neg): (Vec<usize>, Vec<usize>) = train_pool.iter().partition(|&&r| labels.get(r, genre));

    if neg.len() < pos.len() {
        let mut indices: Vec<usize> = train_pool.to_vec();
        indices.sort_unstable();
        let warning = Some(format!(
            "genre {name}: only {} negatives for {} positives; using all of them",
            neg.len(),
            pos.len()
        ));
        return Ok(BalancedSubset {
            genre: name,
            indices,
            positives: pos.len(),
            negatives: neg.len(),
            warning,
        });
    }

    let global = labels.column_counts();
    // group n_genres collects rows with no genre at all
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n_genres + 1];
    for &r in &neg {
        let primary = labels
            .row_genres(r)
            .min_by_key(|&g| (global[g], g))
            .unwrap_or(n_genres);
        groups[primary].push(r);
    }

    let want = pos.len();
    let total = neg.len();
    let mut quotas: Vec<usize> = groups.iter().map(|grp| want * grp.len() / total.max(1)).collect();
    let mut short = want - quotas.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..groups.len()).collect();
    // largest fractional remainder first; remainder numerators are exact integers
    order.sort_by_key(|&h| (std::cmp::Reverse((want * groups[h].len()) % total.max(1)), h));
    for h in order {
        if short == 0 {
            break;
        }
        if quotas[h] < groups[h].len() {
            quotas[h] += 1;
            short -= 1;
        }
    }

    let mut rng = seeded(sub_seed(seed, &format!("ova/{name}")));
    let mut indices = pos.clone();
    for (grp, &q) in groups.iter().zip(&quotas) {
        if q == 0 {
            continue;
        }
        indices.extend(index::sample(&mut rng, grp.len(), q).into_iter().map(|i| grp[i]));
    }
    indices.sort_unstable();
    Ok(BalancedSubset {
        genre: name,
        indices,
        positives: want,
        negatives: want,
        warning: None,
    })
}

/// The full sampling plan for one run: test split plus per-genre subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlan {
    pub seed: u64,
    pub fraction: f64,
    pub manifest_checksum: String,
    /// Extra provenance lines (for example a config hash).
    pub metadata: Vec<(String, String)>,
    pub n_rows: usize,
    pub genres: Vec<String>,
    pub test: Vec<usize>,
    pub train_pool: Vec<usize>,
    pub subsets: Vec<BalancedSubset>,
    pub warnings: Vec<String>,
}

const PLAN_HEADER: &str = "# specmel split plan v1";

impl SplitPlan {
    /// Test split first, then one balanced subset per genre from the
    /// remaining pool. Each genre uses its own derived stream, so the plan
    /// does not depend on the order subsets are drawn.
    pub fn build(labels: &LabelMatrix, fraction: f64, seed: u64, manifest_checksum: impl Into<String>) -> Result<Self> {
        let split = stratified_test_split(labels, fraction, seed)?;
        let mut warnings = split.warnings.clone();
        let subsets = (0..labels.n_genres())
            .map(|g| ova_balanced_subset(labels, g, &split.train_pool, seed))
            .collect::<Result<Vec<_>>>()?;
        warnings.extend(subsets.iter().filter_map(|s| s.warning.clone()));
        Ok(Self {
            seed,
            fraction,
            manifest_checksum: manifest_checksum.into(),
            metadata: Vec::new(),
            n_rows: labels.n_rows(),
            genres: labels.genres().to_vec(),
            test: split.test,
            train_pool: split.train_pool,
            subsets,
            warnings,
        })
    }

    pub fn subset(&self, genre: &str) -> Option<&BalancedSubset> {
        self.subsets.iter().find(|s| s.genre == genre)
    }

    pub fn to_text(&self) -> String {
        fn list(out: &mut String, key: &str, v: &[usize]) {
            let joined: Vec<String> = v.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{key} = {}", joined.join(" "));
        }
        let mut out = String::new();
        let _ = writeln!(out, "{PLAN_HEADER}");
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "fraction = {}", self.fraction);
        let _ = writeln!(out, "manifest_sha256 = {}", self.manifest_checksum);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "meta.{k} = {v}");
        }
        let _ = writeln!(out, "rows = {}", self.n_rows);
        let _ = writeln!(out, "genres = {}", self.genres.join(";"));
        list(&mut out, "test", &self.test);
        list(&mut out, "train_pool", &self.train_pool);
        for s in &self.subsets {
            let _ = writeln!(out, "subset.{}.positives = {}", s.genre, s.positives);
            let _ = writeln!(out, "subset.{}.negatives = {}", s.genre, s.negatives);
            list(&mut out, &format!("subset.{}.indices", s.genre), &s.indices);
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning = {w}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(PLAN_HEADER) {
            return Err(Error::Parse("missing split plan header".into()));
        }
        let parse_list = |v: &str| -> Result<Vec<usize>> {
            v.split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad index {t:?}"))))
                .collect()
        };
        let num_err = |k: &str| Error::Parse(format!("bad value for {k}"));
        let mut plan = SplitPlan {
            seed: 0,
            fraction: 0.0,
            manifest_checksum: String::new(),
            metadata: Vec::new(),
            n_rows: 0,
            genres: Vec::new(),
            test: Vec::new(),
            train_pool: Vec::new(),
            subsets: Vec::new(),
            warnings: Vec::new(),
        };
        for line in lines {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .or_else(|| line.strip_suffix(" =").map(|k| (k, "")))
                .ok_or_else(|| Error::Parse(format!("malformed plan line {line:?}")))?;
            match k {
                "seed" => plan.seed = v.parse().map_err(|_| num_err(k))?,
                "fraction" => plan.fraction = v.parse().map_err(|_| num_err(k))?,
                "manifest_sha256" => plan.manifest_checksum = v.to_string(),
                "rows" => plan.n_rows = v.parse().map_err(|_| num_err(k))?,
                "genres" => {
                    plan.genres = v.split(';').filter(|s| !s.is_empty()).map(str::to_string).collect();
                    plan.subsets = plan
                        .genres
                        .iter()
                        .map(|g| BalancedSubset {
                            genre: g.clone(),
                            indices: Vec::new(),
                            positives: 0,
                            negatives: 0,
                            warning: None,
                        })
                        .collect();
                }
                "test" => plan.test = parse_list(v)?,
                "train_pool" => plan.train_pool = parse_list(v)?,
                "warning" => plan.warnings.push(v.to_string()),
                _ => {
                    if let Some(meta) = k.strip_prefix("meta.") {
                        plan.metadata.push((meta.to_string(), v.to_string()));
                    } else if let Some(rest) = k.strip_prefix("subset.") {
                        let (genre, field) = rest
                            .rsplit_once('.')
                            .ok_or_else(|| Error::Parse(format!("bad subset key {k:?}")))?;
                        let s = plan
                            .subsets
                            .iter_mut()
                            .find(|s| s.genre == genre)
                            .ok_or_else(|| Error::Parse(format!("subset for undeclared genre {genre:?}")))?;
                        match field {
                            "positives" => s.positives = v.parse().map_err(|_| num_err(k))?,
                            "negatives" => s.negatives = v.parse().map_err(|_| num_err(k))?,
                            "indices" => s.indices = parse_list(v)?,
                            _ => return Err(Error::Parse(format!("unknown subset field {field:?}"))),
                        }
                    } else {
                        return Err(Error::Parse(format!("unknown plan key {k:?}")));
                    }
                }
            }
        }
        for s in &mut plan.subsets {
            if s.negatives < s.positives {
                s.warning = plan.warnings.iter().find(|w| w.starts_with(&format!("genre {}:", s.genre))).cloned();
            }
        }
        Ok(plan)
    }
}
