//! Least-squares fitting and the measurement models.

mod lm;
mod models;

pub use lm::{least_squares, least_squares_with, DataSeries, FitOptions, FitResult};
pub use models::{
    fit_g2, fit_saturation, fit_spectrum, g2_model, measured_triplet, G2FitConfig,
    SaturationFitConfig, SpectrumFitConfig,
};
