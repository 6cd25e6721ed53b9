use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArchError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot parse architecture file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot serialize architecture: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error(transparent)]
    Adc(#[from] xbar_adc::AdcError),
    #[error(transparent)]
    Numerics(#[from] xbar_numerics::NumericsError),
}
