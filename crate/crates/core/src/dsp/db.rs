use crate::error::{Error, Result};

use super::spectrogram::{Scale, Spectrogram};

/// Reference power mapped to 0 dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DbReference {
    Fixed(f64),
    /// The spectrogram's own maximum (floored at `amin`).
    Max,
}

/// `10 log10(max(v, amin) / ref)`, optionally clamped to `max - top_db`.
pub fn power_to_db(
    spec: &Spectrogram,
    reference: DbReference,
    amin: f64,
    top_db: Option<f64>,
) -> Result<Spectrogram> {
    if spec.scale() != Scale::Power {
        return Err(Error::Validation("spectrogram is already in decibels".into()));
    }
    if !(amin > 0.0) {
        return Err(Error::Domain(format!("amin {amin} must be positive")));
    }
    let ref_value = match reference {
        DbReference::Fixed(r) if r > 0.0 && r.is_finite() => r,
        DbReference::Fixed(r) => return Err(Error::Domain(format!("reference {r} must be positive"))),
        DbReference::Max => spec.values().iter().copied().fold(0.0, f64::max).max(amin),
    };
    if let Some(t) = top_db {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("top_db {t} must be non-negative")));
        }
    }

    let offset = 10.0 * ref_value.log10();
    let mut db: Vec<f64> = spec
        .values()
        .iter()
        .map(|&v| 10.0 * v.max(amin).log10() - offset)
        .collect();
    if let Some(t) = top_db {
        let floor = db.iter().copied().fold(f64::NEG_INFINITY, f64::max) - t;
        db.iter_mut().for_each(|d| *d = d.max(floor));
    }
    spec.with_values(db, Scale::Decibel)
}
