//! Paired comparison of per-cell scores: differences, Shapiro–Wilk
//! normality, two-sided paired t-test, and normal Q-Q coordinates.

mod paired;
mod shapiro;
pub mod special;
mod ttest;

pub use paired::{paired_comparison, paired_differences, qq_data, PairedSample, PairedTestResult, QqPoint};
pub use shapiro::{shapiro_wilk, ShapiroWilk, SHAPIRO_MAX_N, SHAPIRO_MIN_N};
pub use special::{inverse_normal_cdf, normal_cdf, student_t_cdf};
pub use ttest::{paired_t_test, TTest};
