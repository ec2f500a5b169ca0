//! Tunable tolerances and the deterministic seed.

/// Numerical policy for the whole pipeline.
///
/// All tolerances are relative: they are multiplied by a scale derived from
/// the data (spectral radius, max-norm) at the point of use.
#[derive(Debug, Clone)]
pub struct Config {
    /// Seed for every randomized choice (joint-diagonalization combinations).
    pub seed: u64,
    /// Hermiticity check at construction.
    pub herm_tol: f64,
    /// Unitarity checks.
    pub unitary_tol: f64,
    /// Eigendecomposition / joint-diagonalization off-diagonal residual.
    pub diag_tol: f64,
    /// Base feasibility tolerance for the transfer-matrix LP.
    pub feas_tol: f64,
    /// Phase-1 optima in (feas_tol, marginal_factor * feas_tol] are "marginal".
    pub marginal_factor: f64,
    /// Entries below this are zeroed while peeling a Birkhoff decomposition.
    pub peel_tol: f64,
    /// Number of support-function samples for numerical-range containment.
    pub numrange_grid: usize,
    /// Base tolerance for numerical-range containment.
    pub numrange_tol: f64,
    /// Residual threshold (relative) for unital/TP/CP property verdicts.
    pub property_tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            herm_tol: 1e-10,
            unitary_tol: 1e-10,
            diag_tol: 1e-8,
            feas_tol: 1e-8,
            marginal_factor: 10.0,
            peel_tol: 1e-12,
            numrange_grid: 720,
            numrange_tol: 1e-7,
            property_tol: 1e-8,
        }
    }
}
