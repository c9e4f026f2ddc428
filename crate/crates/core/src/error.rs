use thiserror::Error;

/// Every failure the library can report.
///
/// Variant names double as the machine-readable error codes printed by the
/// CLI, so keep them stable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is empty or too small: need n >= {min_rows} and d >= 1, got {n}x{d}")]
    BadShape { n: usize, d: usize, min_rows: usize },
    #[error("row-major buffer has {got} values, expected {expected}")]
    BufferLength { expected: usize, got: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("row {0} has (near) zero norm")]
    ZeroNormRow(usize),
    #[error("row {0} is constant; correlation distance undefined")]
    ConstantRow(usize),
    #[error("column {0} is constant; cannot z-score")]
    ConstantColumn(usize),
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {min} values, got {got}")]
    TooShort { min: usize, got: usize },
    #[error("input is constant after ranking; correlation undefined")]
    Degenerate,
    #[error("requested rank {k} exceeds the available maximum {max}")]
    RankTooHigh { k: usize, max: usize },
    #[error("covariance is singular; use shrinkage > 0")]
    SingularCovariance,
    #[error("need at least 2 features for a feature split, got {0}")]
    TooFewFeatures(usize),
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("need at least {min} classes, got {got}")]
    TooFewClasses { min: usize, got: usize },
    #[error("class {class} has {count} samples, need at least {min}")]
    ClassTooSmall { class: usize, count: usize, min: usize },
    #[error("label vector length {labels} does not match {rows} rows")]
    LabelLength { labels: usize, rows: usize },
    #[error("class {0} is missing from the label vector")]
    MissingClass(usize),
    #[error("total variance is zero")]
    ZeroTotalVariance,
    #[error("no within-class pairs after {0} subsample attempts")]
    EmptyWithinPairs(usize),
    #[error("within-class covariance is singular")]
    SingularWithinCovariance,
    #[error("only two-class data is supported, got {0} classes")]
    UnsupportedClassCount(usize),
    #[error("condition {condition} has {count} trials, need at least 2")]
    ConditionTooSmall { condition: usize, count: usize },
    #[error("need at least 3 conditions, got {0}")]
    TooFewConditions(usize),
    #[error("need at least 10 perturbed rows, got {0}")]
    TooFewCells(usize),
    #[error("mean shift magnitude is below 1e-6")]
    DegenerateShift,
    #[error("centroid has zero norm")]
    ZeroCentroid,
    #[error("representation has zero norm after centering")]
    ZeroNorm,
    #[error("feature dimension mismatch ({0} vs {1})")]
    DimMismatch(usize, usize),
    #[error("row count mismatch ({0} vs {1})")]
    RowCountMismatch(usize, usize),
    #[error("median pairwise distance is zero; bandwidth undefined")]
    DegenerateBandwidth,
    #[error("spectrum is zero")]
    ZeroSpectrum,
    #[error("rejection sampling exhausted after {0} attempts")]
    RejectionExhausted(usize),
    #[error("every bootstrap replicate was degenerate")]
    AllReplicatesDegenerate,
    #[error("control design matrix is rank deficient")]
    CollinearControls,
    #[error("drift series is empty")]
    EmptySeries,
    #[error("perturbation levels must be strictly increasing")]
    UnorderedLevels,
    #[error("series do not share the same levels")]
    LevelMismatch,
    #[error("only one class present")]
    SingleClass,
    #[error("series has no stable points")]
    NoStablePoints,
    #[error("series carries no accuracy values")]
    MissingAccuracy,
    #[error("unknown metric '{0}'")]
    UnknownMetric(String),
    #[error("probe weights are zero")]
    ZeroWeights,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("labels are required for metric '{0}'")]
    LabelRequired(String),
    #[error("a reference matrix is required for metric '{0}'")]
    ReferenceRequired(String),
    #[error("cannot parse encoder spec '{0}'")]
    SpecParse(String),
    #[error("malformed matrix file: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short code used on the CLI's stderr line, e.g. `ZeroNormRow`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::BadShape { .. } => "BadShape",
            Error::BufferLength { .. } => "BufferLength",
            Error::NonFinite { .. } => "NonFinite",
            Error::ZeroNormRow(_) => "ZeroNormRow",
            Error::ConstantRow(_) => "ConstantRow",
            Error::ConstantColumn(_) => "ConstantColumn",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::TooShort { .. } => "TooShort",
            Error::Degenerate => "Degenerate",
            Error::RankTooHigh { .. } => "RankTooHigh",
            Error::SingularCovariance => "SingularCovariance",
            Error::TooFewFeatures(_) => "TooFewFeatures",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::TooFewClasses { .. } => "TooFewClasses",
            Error::ClassTooSmall { .. } => "ClassTooSmall",
            Error::LabelLength { .. } => "LabelLength",
            Error::MissingClass(_) => "MissingClass",
            Error::ZeroTotalVariance => "ZeroTotalVariance",
            Error::EmptyWithinPairs(_) => "EmptyWithinPairs",
            Error::SingularWithinCovariance => "SingularWithinCovariance",
            Error::UnsupportedClassCount(_) => "UnsupportedClassCount",
            Error::ConditionTooSmall { .. } => "ConditionTooSmall",
            Error::TooFewConditions(_) => "TooFewConditions",
            Error::TooFewCells(_) => "TooFewCells",
            Error::DegenerateShift => "DegenerateShift",
            Error::ZeroCentroid => "ZeroCentroid",
            Error::ZeroNorm => "ZeroNorm",
            Error::DimMismatch(..) => "DimMismatch",
            Error::RowCountMismatch(..) => "RowCountMismatch",
            Error::DegenerateBandwidth => "DegenerateBandwidth",
            Error::ZeroSpectrum => "ZeroSpectrum",
            Error::RejectionExhausted(_) => "RejectionExhausted",
            Error::AllReplicatesDegenerate => "AllReplicatesDegenerate",
            Error::CollinearControls => "CollinearControls",
            Error::EmptySeries => "EmptySeries",
            Error::UnorderedLevels => "UnorderedLevels",
            Error::LevelMismatch => "LevelMismatch",
            Error::SingleClass => "SingleClass",
            Error::NoStablePoints => "NoStablePoints",
            Error::MissingAccuracy => "MissingAccuracy",
            Error::UnknownMetric(_) => "UnknownMetric",
            Error::ZeroWeights => "ZeroWeights",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::LabelRequired(_) => "LabelRequired",
            Error::ReferenceRequired(_) => "ReferenceRequired",
            Error::SpecParse(_) => "SpecParse",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
