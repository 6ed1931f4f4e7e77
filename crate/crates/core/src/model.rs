//! Per-genre binary classifiers over pooled spectrogram statistics.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;

use crate::dsp::{Scale, Spectrogram, SpectrogramKind};
use crate::error::{Error, Result};
use crate::rng::seeded;

pub const DEFAULT_THRESHOLD: f64 = 0.5;
const STD_FLOOR: f64 = 1e-8;

/// Pooling granularity: the spectrogram rows are grouped into `bands`
/// contiguous bands before summarizing over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelVariant {
    bands: usize,
}

impl ModelVariant {
    pub const DEFAULTS: [ModelVariant; 4] = [
        ModelVariant { bands: 32 },
        ModelVariant { bands: 64 },
        ModelVariant { bands: 96 },
        ModelVariant { bands: 128 },
    ];

    pub fn new(bands: usize) -> Result<Self> {
        if bands == 0 {
            return Err(Error::Validation("model variant needs at least one band".into()));
        }
        Ok(Self { bands })
    }

    pub fn bands(self) -> usize {
        self.bands
    }

    pub fn feature_len(self) -> usize {
        2 * self.bands
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}", self.bands)
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s.trim().strip_prefix('b').unwrap_or(s.trim());
        let bands = digits
            .parse()
            .map_err(|_| Error::Parse(format!("model variant `{s}` is not of the form b<bands>")))?;
        Self::new(bands)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    track_id: String,
    kind: SpectrogramKind,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, track_id: impl Into<String>, kind: SpectrogramKind) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("feature vector"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("feature vector contains non-finite values".into()));
        }
        Ok(Self {
            values,
            track_id: track_id.into(),
            kind,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn track_id(&self) -> &str {
        &self.track_id
    }

    pub fn kind(&self) -> SpectrogramKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-row mean and population standard deviation over time, one band per row.
pub fn pool_features(spec: &Spectrogram, track_id: &str) -> Result<FeatureVector> {
    pool_banded(spec, spec.rows(), track_id)
}

/// Rows are averaged into `bands` contiguous groups (row `i` goes to band
/// `floor(i * bands / rows)`), then each band's mean and population standard
/// deviation over time are concatenated: `[means..., stds...]`.
pub fn pool_banded(spec: &Spectrogram, bands: usize, track_id: &str) -> Result<FeatureVector> {
    if spec.is_empty() {
        return Err(Error::EmptyInput("spectrogram"));
    }
    if spec.scale() != Scale::Decibel {
        return Err(Error::Validation("feature pooling expects a decibel spectrogram".into()));
    }
    let (rows, cols) = (spec.rows(), spec.cols());
    if bands == 0 || bands > rows {
        return Err(Error::Shape(format!("cannot pool {rows} rows into {bands} bands")));
    }
    let mut band_sum = vec![vec![0.0; cols]; bands];
    let mut band_rows = vec![0usize; bands];
    for r in 0..rows {
        let b = r * bands / rows;
        band_rows[b] += 1;
        for (acc, v) in band_sum[b].iter_mut().zip(spec.row(r)) {
            *acc += v;
        }
    }
    let mut means = Vec::with_capacity(bands);
    let mut stds = Vec::with_capacity(bands);
    for (series, &count) in band_sum.iter().zip(&band_rows) {
        let series: Vec<f64> = series.iter().map(|s| s / count as f64).collect();
        let mean = series.iter().sum::<f64>() / cols as f64;
        let var = series.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / cols as f64;
        means.push(mean);
        stds.push(var.sqrt());
    }
    means.extend(stds);
    FeatureVector::new(means, track_id, spec.kind())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 200,
            batch_size: 32,
            l2: 1e-4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Validation(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Validation("epochs and batch size must be positive".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::Validation(format!("l2 must be nonnegative, got {}", self.l2)));
        }
        Ok(())
    }
}

/// Weights and bias of a logistic model acting on already standardized inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearParams {
    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Binary cross-entropy evaluated from the logit.
pub fn bce_from_logit(z: f64, positive: bool) -> f64 {
    if positive {
        softplus(-z)
    } else {
        softplus(z)
    }
}

/// Binary cross-entropy of a probability, routed through the logit form.
pub fn bce_loss(p: f64, positive: bool) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    let z = if p == 0.0 {
        f64::NEG_INFINITY
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        (p / (1.0 - p)).ln()
    };
    Ok(match (positive, z) {
        (true, f64::INFINITY) | (false, f64::NEG_INFINITY) => 0.0,
        (_, z) if z.is_infinite() => f64::INFINITY,
        (y, z) => bce_from_logit(z, y),
    })
}

/// Mean cross-entropy plus `(l2 / 2) * ||w||^2`.
pub fn objective(params: &LinearParams, xs: &[&[f64]], ys: &[bool], l2: f64) -> Result<f64> {
    check_batch(params, xs, ys)?;
    let data: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| bce_from_logit(params.logit(x), y))
        .sum::<f64>()
        / xs.len() as f64;
    let norm2: f64 = params.weights.iter().map(|w| w * w).sum();
    Ok(data + 0.5 * l2 * norm2)
}

/// Analytic gradient of [`objective`].
pub fn gradient(params: &LinearParams, xs: &[&[f64]], ys: &[bool], l2: f64) -> Result<LinearParams> {
    check_batch(params, xs, ys)?;
    let n = xs.len() as f64;
    let mut gw = vec![0.0; params.weights.len()];
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let r = sigmoid(params.logit(x)) - if y { 1.0 } else { 0.0 };
        gb += r;
        for (g, v) in gw.iter_mut().zip(x.iter()) {
            *g += r * v;
        }
    }
    for (g, w) in gw.iter_mut().zip(&params.weights) {
        *g = *g / n + l2 * w;
    }
    Ok(LinearParams {
        weights: gw,
        bias: gb / n,
    })
}

fn check_batch(params: &LinearParams, xs: &[&[f64]], ys: &[bool]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("batch"));
    }
    if xs.len() != ys.len() {
        return Err(Error::Shape(format!("{} feature rows but {} labels", xs.len(), ys.len())));
    }
    let dim = params.weights.len();
    if let Some(x) = xs.iter().find(|x| x.len() != dim) {
        return Err(Error::Shape(format!("feature length {} does not match {dim} weights", x.len())));
    }
    Ok(())
}

/// Which experimental cell a classifier belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub genre: String,
    pub kind: SpectrogramKind,
    pub variant: String,
}

impl CellId {
    pub fn new(genre: impl Into<String>, kind: SpectrogramKind, variant: impl Into<String>) -> Self {
        Self {
            genre: genre.into(),
            kind,
            variant: variant.into(),
        }
    }

    /// Label for deriving the cell's random stream.
    pub fn stream_label(&self) -> String {
        format!("train/{}/{}/{}", self.variant, self.kind, self.genre)
    }
}

/// A trained classifier: standardization statistics plus a logistic model.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierParams {
    pub cell: CellId,
    pub feature_mean: Vec<f64>,
    pub feature_scale: Vec<f64>,
    pub linear: LinearParams,
    pub config: TrainConfig,
}

impl ClassifierParams {
    pub fn feature_len(&self) -> usize {
        self.linear.weights.len()
    }

    pub fn standardize(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.feature_len() {
            return Err(Error::Shape(format!(
                "feature length {} does not match classifier length {}",
                x.len(),
                self.feature_len()
            )));
        }
        Ok(x.iter()
            .zip(&self.feature_mean)
            .zip(&self.feature_scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }

    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        Ok(self.linear.logit(&self.standardize(x)?))
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        let mut out = String::from("# specmel classifier v1\n");
        let c = &self.config;
        let _ = writeln!(out, "genre = {}", self.cell.genre);
        let _ = writeln!(out, "kind = {}", self.cell.kind);
        let _ = writeln!(out, "variant = {}", self.cell.variant);
        let _ = writeln!(out, "features = {}", self.feature_len());
        let _ = writeln!(out, "feature_mean = {}", join(&self.feature_mean));
        let _ = writeln!(out, "feature_scale = {}", join(&self.feature_scale));
        let _ = writeln!(out, "weights = {}", join(&self.linear.weights));
        let _ = writeln!(out, "bias = {}", self.linear.bias);
        let _ = writeln!(out, "learning_rate = {}", c.learning_rate);
        let _ = writeln!(out, "epochs = {}", c.epochs);
        let _ = writeln!(out, "batch_size = {}", c.batch_size);
        let _ = writeln!(out, "l2 = {}", c.l2);
        let _ = writeln!(out, "seed = {}", c.seed);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut fields = std::collections::HashMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("classifier line without `=`: {line}")))?;
            fields.insert(k.trim(), v.trim());
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::Parse(format!("classifier missing `{k}`")));
        fn num<T: FromStr>(k: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Parse(format!("bad value for `{k}`: {v}")))
        }
        let vec = |k: &str| -> Result<Vec<f64>> {
            let v = get(k)?;
            if v.is_empty() {
                return Ok(Vec::new());
            }
            v.split(';').map(|x| num(k, x)).collect()
        };
        let n: usize = num("features", get("features")?)?;
        let params = Self {
            cell: CellId::new(get("genre")?, get("kind")?.parse()?, get("variant")?),
            feature_mean: vec("feature_mean")?,
            feature_scale: vec("feature_scale")?,
            linear: LinearParams {
                weights: vec("weights")?,
                bias: num("bias", get("bias")?)?,
            },
            config: TrainConfig {
                learning_rate: num("learning_rate", get("learning_rate")?)?,
                epochs: num("epochs", get("epochs")?)?,
                batch_size: num("batch_size", get("batch_size")?)?,
                l2: num("l2", get("l2")?)?,
                seed: num("seed", get("seed")?)?,
            },
        };
        if [&params.feature_mean, &params.feature_scale, &params.linear.weights]
            .iter()
            .any(|v| v.len() != n)
        {
            return Err(Error::Parse(format!("classifier vectors do not all have length {n}")));
        }
        let all = params
            .feature_mean
            .iter()
            .chain(&params.feature_scale)
            .chain(&params.linear.weights)
            .chain(std::iter::once(&params.linear.bias));
        if all.clone().any(|v| !v.is_finite()) || params.feature_scale.iter().any(|&s| s <= 0.0) {
            return Err(Error::Parse("classifier contains invalid parameters".into()));
        }
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: ClassifierParams,
    /// Objective over the whole subset after each epoch.
    pub loss_history: Vec<f64>,
    pub warning: Option<String>,
}

/// Plug point for classifier backends.
pub trait BinaryClassifier {
    fn train(
        &self,
        cell: CellId,
        features: &[Vec<f64>],
        labels: &[bool],
        subset: &[usize],
    ) -> Result<TrainOutcome>;

    fn forward(&self, params: &ClassifierParams, x: &[f64]) -> Result<f64>;

    fn predict(&self, params: &ClassifierParams, x: &[f64], threshold: f64) -> Result<bool> {
        Ok(self.forward(params, x)? >= threshold)
    }
}

/// Logistic regression trained by mini-batch gradient descent.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LogisticClassifier {
    pub config: TrainConfig,
}

impl BinaryClassifier for LogisticClassifier {
    fn train(
        &self,
        cell: CellId,
        features: &[Vec<f64>],
        labels: &[bool],
        subset: &[usize],
    ) -> Result<TrainOutcome> {
        train(cell, features, labels, subset, &self.config)
    }

    fn forward(&self, params: &ClassifierParams, x: &[f64]) -> Result<f64> {
        forward(params, x)
    }
}

pub fn forward(params: &ClassifierParams, x: &[f64]) -> Result<f64> {
    Ok(sigmoid(params.logit(x)?))
}

pub fn predict(params: &ClassifierParams, x: &[f64], threshold: f64) -> Result<bool> {
    Ok(forward(params, x)? >= threshold)
}

/// Mean cross-entropy of `params` on the given rows.
pub fn mean_bce(params: &ClassifierParams, xs: &[&[f64]], ys: &[bool]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("evaluation rows"));
    }
    let mut total = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        total += bce_from_logit(params.logit(x)?, y);
    }
    Ok(total / xs.len() as f64)
}

pub fn train(
    cell: CellId,
    features: &[Vec<f64>],
    labels: &[bool],
    subset: &[usize],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if subset.is_empty() {
        return Err(Error::EmptyInput("training subset"));
    }
    if features.len() != labels.len() {
        return Err(Error::Shape(format!("{} feature rows but {} labels", features.len(), labels.len())));
    }
    if let Some(&i) = subset.iter().find(|&&i| i >= features.len()) {
        return Err(Error::Shape(format!("subset index {i} out of range for {} rows", features.len())));
    }
    let dim = features[subset[0]].len();
    if dim == 0 || subset.iter().any(|&i| features[i].len() != dim) {
        return Err(Error::Shape("training features have inconsistent lengths".into()));
    }

    let n = subset.len() as f64;
    let mut mean = vec![0.0; dim];
    for &i in subset {
        for (m, v) in mean.iter_mut().zip(&features[i]) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut scale = vec![0.0; dim];
    for &i in subset {
        for ((s, v), m) in scale.iter_mut().zip(&features[i]).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    scale.iter_mut().for_each(|s| *s = (*s / n).sqrt().max(STD_FLOOR));

    let rows: Vec<Vec<f64>> = subset
        .iter()
        .map(|&i| {
            features[i]
                .iter()
                .zip(&mean)
                .zip(&scale)
                .map(|((v, m), s)| (v - m) / s)
                .collect()
        })
        .collect();
    let ys: Vec<bool> = subset.iter().map(|&i| labels[i]).collect();
    let all_x: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();

    let positives = ys.iter().filter(|&&y| y).count();
    let warning = (positives == 0 || positives == ys.len()).then(|| {
        format!("{}/{}: training subset contains a single class", cell.kind, cell.genre)
    });

    let mut rng = seeded(crate::rng::sub_seed(config.seed, &cell.stream_label()));
    let mut params = LinearParams::zeros(dim);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let bx: Vec<&[f64]> = chunk.iter().map(|&k| rows[k].as_slice()).collect();
            let by: Vec<bool> = chunk.iter().map(|&k| ys[k]).collect();
            let g = gradient(&params, &bx, &by, config.l2)?;
            for (w, gw) in params.weights.iter_mut().zip(&g.weights) {
                *w -= config.learning_rate * gw;
            }
            params.bias -= config.learning_rate * g.bias;
        }
        let loss = objective(&params, &all_x, &ys, config.l2)?;
        if !loss.is_finite() || params.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Divergence { epoch, loss });
        }
        history.push(loss);
    }

    Ok(TrainOutcome {
        params: ClassifierParams {
            cell,
            feature_mean: mean,
            feature_scale: scale,
            linear: params,
            config: *config,
        },
        loss_history: history,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db_spec(rows: usize, cols: usize, values: Vec<f64>) -> Spectrogram {
        Spectrogram::new(rows, cols, values, Scale::Decibel, SpectrogramKind::Mel, 22050, 2048, 512).unwrap()
    }

    fn cell() -> CellId {
        CellId::new("Jazz", SpectrogramKind::Mel, "b32")
    }

    #[test]
    fn pooling_examples() {
        let f = pool_features(&db_spec(3, 4, vec![-7.0; 12]), "t").unwrap();
        assert_eq!(f.values(), &[-7.0, -7.0, -7.0, 0.0, 0.0, 0.0]);
        let f = pool_features(&db_spec(2, 1, vec![-3.0, -9.0]), "t").unwrap();
        assert_eq!(f.values(), &[-3.0, -9.0, 0.0, 0.0]);
        let f = pool_features(&db_spec(1, 2, vec![0.0, 2.0]), "t").unwrap();
        assert_eq!(f.values(), &[1.0, 1.0]);
    }

    #[test]
    fn banded_pooling_groups_rows() {
        // rows 0,1 -> band 0; rows 2,3 -> band 1
        let spec = db_spec(4, 2, vec![0.0, 2.0, 2.0, 4.0, -10.0, -10.0, -20.0, -20.0]);
        let f = pool_banded(&spec, 2, "t").unwrap();
        assert_eq!(f.values(), &[2.0, -15.0, 1.0, 0.0]);
        assert!(pool_banded(&spec, 5, "t").is_err());
        let power = Spectrogram::new(1, 1, vec![1.0], Scale::Power, SpectrogramKind::Mel, 22050, 2048, 512).unwrap();
        assert!(pool_features(&power, "t").is_err());
    }

    #[test]
    fn variant_names() {
        assert_eq!("b96".parse::<ModelVariant>().unwrap().bands(), 96);
        assert_eq!(ModelVariant::new(32).unwrap().to_string(), "b32");
        assert!("b0".parse::<ModelVariant>().is_err());
        assert!("wide".parse::<ModelVariant>().is_err());
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        let p = sigmoid(1e3);
        assert!((1.0 - 1e-12..=1.0).contains(&p));
        assert_eq!(sigmoid(-1e3), 0.0);
        let lp = LinearParams { weights: vec![1.0], bias: 0.0 };
        assert!((sigmoid(lp.logit(&[3f64.ln()])) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn bce_values() {
        assert!(bce_from_logit(50.0, true) < 1e-6);
        assert!(bce_from_logit(-50.0, false) < 1e-6);
        let ln2 = std::f64::consts::LN_2;
        assert!((bce_loss(0.5, true).unwrap() - ln2).abs() < 1e-15);
        assert!((bce_loss(0.5, false).unwrap() - ln2).abs() < 1e-15);
        assert!(bce_from_logit(-10.0, true) > bce_from_logit(0.0, true));
        assert!(bce_from_logit(1e4, false).is_finite());
        assert_eq!(bce_loss(1.0, true).unwrap(), 0.0);
        assert!(bce_loss(1.5, true).is_err());
    }

    #[test]
    fn gradient_examples() {
        let g = gradient(&LinearParams::zeros(1), &[&[1.0]], &[true], 0.0).unwrap();
        assert_eq!((g.weights[0], g.bias), (-0.5, -0.5));
        let lp = LinearParams { weights: vec![40.0], bias: 0.0 };
        let g = gradient(&lp, &[&[1.0], &[-1.0]], &[true, false], 0.0).unwrap();
        assert!(g.weights[0].abs() < 1e-15 && g.bias.abs() < 1e-15);
        assert!(gradient(&lp, &[], &[], 0.0).is_err());
    }

    #[test]
    fn separable_toy_set() {
        let features: Vec<Vec<f64>> = (0..10).map(|i| vec![if i < 5 { -1.0 } else { 1.0 }]).collect();
        let labels: Vec<bool> = (0..10).map(|i| i >= 5).collect();
        let subset: Vec<usize> = (0..10).collect();
        let config = TrainConfig { learning_rate: 0.5, ..TrainConfig::default() };
        let out = train(cell(), &features, &labels, &subset, &config).unwrap();
        assert_eq!(out.loss_history.len(), 200);
        for (x, &y) in features.iter().zip(&labels) {
            assert_eq!(predict(&out.params, x, DEFAULT_THRESHOLD).unwrap(), y);
        }
        let again = train(cell(), &features, &labels, &subset, &config).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn single_class_subset() {
        let features: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 1.0]).collect();
        let labels = vec![false; 6];
        let out = train(cell(), &features, &labels, &[0, 1, 2, 3, 4, 5], &TrainConfig::default()).unwrap();
        assert!(out.warning.is_some());
        assert!(features.iter().all(|x| !predict(&out.params, x, 0.5).unwrap()));
    }

    #[test]
    fn predict_ties_and_thresholds() {
        let params = ClassifierParams {
            cell: cell(),
            feature_mean: vec![0.0; 2],
            feature_scale: vec![1.0; 2],
            linear: LinearParams::zeros(2),
            config: TrainConfig::default(),
        };
        assert!(predict(&params, &[3.0, -1.0], DEFAULT_THRESHOLD).unwrap());
        let mut p2 = params.clone();
        p2.linear.bias = 2.0;
        assert!(!predict(&p2, &[0.0, 0.0], 1.0).unwrap());
        assert!(predict(&params, &[1.0], 0.5).is_err());
    }

    #[test]
    fn divergence_is_reported() {
        let features: Vec<Vec<f64>> = (0..8).map(|i| vec![(i as f64) - 3.5]).collect();
        let labels: Vec<bool> = (0..8).map(|i| i % 2 == 0).collect();
        let config = TrainConfig { learning_rate: 1e308, l2: 1.0, ..TrainConfig::default() };
        let err = train(cell(), &features, &labels, &(0..8).collect::<Vec<_>>(), &config).unwrap_err();
        assert!(matches!(err, Error::Divergence { epoch: 1, .. }), "{err:?}");
    }

    #[test]
    fn params_text_round_trip() {
        let features: Vec<Vec<f64>> = (0..12).map(|i| vec![(i as f64).sin(), (i as f64) * 0.3]).collect();
        let labels: Vec<bool> = (0..12).map(|i| i % 3 == 0).collect();
        let out = train(cell(), &features, &labels, &(0..12).collect::<Vec<_>>(), &TrainConfig::default()).unwrap();
        let text = out.params.to_text();
        assert_eq!(ClassifierParams::from_text(&text).unwrap(), out.params);
        assert!(ClassifierParams::from_text(&text.replace("features = 2", "features = 3")).is_err());
    }
}
