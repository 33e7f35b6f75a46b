//! Every bound for one `(state, A, B)` triple, gathered into a serializable report.

use serde::{Deserialize, Serialize};

use crate::config::BoundConfig;
use crate::entropic::{entropic_product_bound, entropic_sum_bound, EntropicProduct, EntropicSum};
use crate::error::Result;
use crate::perm::Permutation;
use crate::product::{
    chain, correlation_bound, l1, max_permuted_partial_cs, mondal_product_bound, product_interval, schrodinger_bound,
    u1, ProductInterval, SearchStrategy, UpperBound,
};
use crate::quantum::{variance, BasisKind, Construction, Observable, QuantumState};
use crate::sum::{l2_with, mondal_sum_bound, sum_interval, u2, SumInterval};

/// Bounds that need coefficient vectors and hence, for the amplitude
/// construction, a pure state.
pub const COEFFICIENT_BOUNDS: &[&str] =
    &["chain", "l1", "mondal_in", "max_perm_in", "u1", "l2", "mondal_sum", "u2", "entropic_product"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sections {
    pub product: bool,
    pub sum: bool,
}

impl Sections {
    pub const PRODUCT: Sections = Sections { product: true, sum: false };
    pub const SUM: Sections = Sections { product: false, sum: true };
    pub const BOTH: Sections = Sections { product: true, sum: true };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variances {
    pub v_a: f64,
    pub v_b: f64,
    pub product: f64,
    pub sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub construction: Construction,
    pub basis: Option<BasisKind>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxPermuted {
    pub value: f64,
    pub pi1: Permutation,
    pub pi2: Permutation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSection {
    /// `I_0, ..., I_n`.
    pub chain: Vec<f64>,
    pub l1: Option<f64>,
    pub mondal_in: f64,
    pub schrodinger: f64,
    pub correlation: f64,
    pub max_perm_in: MaxPermuted,
    pub u1: UpperBound,
    pub entropic: Option<EntropicProduct>,
    pub interval: ProductInterval,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumSection {
    pub l2: f64,
    pub l2_pi2: Permutation,
    /// `1/2 sum (x_i + y_i)^2`, reconstructed from the `pi1 = id` comparison.
    pub mondal_sum: f64,
    pub u2: f64,
    pub entropic: EntropicSum,
    pub interval: SumInterval,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub dimension: usize,
    pub variances: Variances,
    pub coefficients: Coefficients,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<ProductSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum: Option<SumSection>,
}

impl BoundReport {
    pub fn compute(
        state: &QuantumState,
        a: &Observable,
        b: &Observable,
        config: &BoundConfig,
        sections: Sections,
    ) -> Result<Self> {
        let pair = config.coefficients(state, a, b)?;
        let (v_a, v_b) = (variance(state, a)?, variance(state, b)?);
        let n = pair.n();

        let product = if sections.product {
            let (value, perms) = max_permuted_partial_cs(&pair, n, SearchStrategy::SortExact)?;
            Some(ProductSection {
                chain: chain(&pair).values,
                l1: if n >= 2 { Some(l1(&pair)?) } else { None },
                mondal_in: mondal_product_bound(&pair),
                schrodinger: schrodinger_bound(state, a, b)?,
                correlation: correlation_bound(state, a, b)?,
                max_perm_in: MaxPermuted { value, pi1: perms.pi1, pi2: perms.pi2 },
                u1: match u1(&pair) {
                    Err(crate::Error::EmptySupport) => UpperBound::Finite(0.0),
                    other => other?,
                },
                entropic: if n >= 2 { Some(entropic_product_bound(state, a, b, config)?) } else { None },
                interval: product_interval(state, a, b, config)?,
            })
        } else {
            None
        };

        let sum = if sections.sum {
            let l2_pi2 = config.pi2_for(n);
            Some(SumSection {
                l2: l2_with(&pair, &l2_pi2)?,
                l2_pi2,
                mondal_sum: mondal_sum_bound(&pair),
                u2: u2(&pair),
                entropic: entropic_sum_bound(state, a, b)?,
                interval: sum_interval(state, a, b, config)?,
            })
        } else {
            None
        };

        Ok(Self {
            dimension: n,
            variances: Variances { v_a, v_b, product: v_a * v_b, sum: v_a + v_b },
            coefficients: Coefficients {
                construction: pair.construction(),
                basis: pair.basis(),
                x: pair.x().to_vec(),
                y: pair.y().to_vec(),
            },
            product,
            sum,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }
}

/// Just the two uncertainty intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub product: ProductInterval,
    pub sum: SumInterval,
}

impl IntervalReport {
    pub fn compute(state: &QuantumState, a: &Observable, b: &Observable, config: &BoundConfig) -> Result<Self> {
        Ok(Self { product: product_interval(state, a, b, config)?, sum: sum_interval(state, a, b, config)? })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("intervals are serializable")
    }
}
