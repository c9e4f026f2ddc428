//! Generators and transformations for controlled experiments.

mod classes;
mod encoders;
mod generators;
mod quadrants;

pub use classes::{gen_two_class, TwoClassSpec};
pub use encoders::{apply_encoder, EncoderKind, EncoderTransform};
pub use generators::{gen_mixed, gen_power_law, power_law_value, spectral_delete, MixedSpec, SignalScale};
pub use quadrants::{gen_quadrants, validation_shesha_config, Quadrant, QuadrantPair, QUADRANT_MAX_ATTEMPTS};

pub const DEFAULT_SEED: u64 = 320;

/// Fifteen-seed list for multi-seed suites.
pub const STANDARD_SEEDS: [u64; 15] = [3, 7, 9, 11, 12, 18, 103, 108, 320, 411, 724, 1754, 1991, 2222, 7258];
