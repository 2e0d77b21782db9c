//! Decibel/linear conversions. Power values inside the engine are linear
//! watts; configuration boundaries convert from dBW exactly once.

/// Convert a decibel power ratio to a linear factor.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear power ratio to decibels. Non-positive inputs map to -inf.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
