//! Shared comparison helpers for ordering and containment checks.

/// Relative slack used for bound orderings and interval containment.
pub const ORDER_REL: f64 = 1e-9;

/// Absolute floor added to every relative comparison; values derived from
/// O(1) matrices carry rounding noise of this size even when they should be 0.
pub const ABS_FLOOR: f64 = 1e-14;

/// `a <= b` up to `rel * max(|a|, |b|) + ABS_FLOOR`.
pub fn le_within(a: f64, b: f64, rel: f64) -> bool {
    a <= b + rel * a.abs().max(b.abs()) + ABS_FLOOR
}

/// `|a - b| / max(1, |a|, |b|)`.
pub fn hybrid_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
