use crate::error::Result;
use crate::perm::Permutation;
use crate::quantum::{
    coefficients_basis, coefficients_fidelity, Basis, BasisKind, CoefficientPair, Construction, Observable,
    QuantumState,
};

/// Frame used by the amplitude (basis-expansion) construction.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum BasisChoice {
    #[default]
    Computational,
    EigenA,
    EigenB,
    Explicit(Basis),
}

impl BasisChoice {
    pub fn kind(&self) -> BasisKind {
        match self {
            Self::Computational => BasisKind::Computational,
            Self::EigenA => BasisKind::EigenA,
            Self::EigenB => BasisKind::EigenB,
            Self::Explicit(_) => BasisKind::Explicit,
        }
    }

    pub fn resolve(&self, a: &Observable, b: &Observable) -> Basis {
        match self {
            Self::Computational => Basis::computational(a.dim()),
            Self::EigenA => Basis::eigen(a, BasisKind::EigenA),
            Self::EigenB => Basis::eigen(b, BasisKind::EigenB),
            Self::Explicit(basis) => basis.clone(),
        }
    }
}

/// How coefficient vectors are built and which knobs the bounds use.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundConfig {
    /// `Basis` or `Fidelity`; `Supplied` is treated as `Basis`.
    pub construction: Construction,
    pub basis: BasisChoice,
    /// Second permutation of the sum bound; `None` means the n-cycle.
    pub pi2: Option<Permutation>,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self { construction: Construction::Basis, basis: BasisChoice::Computational, pi2: None }
    }
}

impl BoundConfig {
    pub fn fidelity() -> Self {
        Self { construction: Construction::Fidelity, ..Self::default() }
    }

    pub fn with_basis(basis: BasisChoice) -> Self {
        Self { basis, ..Self::default() }
    }

    pub fn coefficients(&self, state: &QuantumState, a: &Observable, b: &Observable) -> Result<CoefficientPair> {
        match self.construction {
            Construction::Fidelity => coefficients_fidelity(state, a, b),
            Construction::Basis | Construction::Supplied => coefficients_basis(state, a, b, &self.basis.resolve(a, b)),
        }
    }

    pub fn pi2_for(&self, n: usize) -> Permutation {
        self.pi2.clone().unwrap_or_else(|| Permutation::cycle(n))
    }
}
