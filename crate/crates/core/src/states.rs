//! Two-component cat states `c1|+s⟩^⊗n + c2|−s⟩^⊗n` and their density split.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DimCap, StateVector, C64};
use crate::spin::{reduce_angle, HalfInteger};

/// `c1 = e^{iη} sin ξ`, `c2 = e^{−iη} cos ξ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatState {
    n: usize,
    s: HalfInteger,
    xi: f64,
    eta: f64,
    c1: C64,
    c2: C64,
}

impl CatState {
    /// ξ and η are reduced mod 2π before the amplitudes are formed.
    pub fn new(n: usize, s: HalfInteger, xi: f64, eta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewParticles(n));
        }
        if !xi.is_finite() {
            return Err(Error::InvalidAngle { name: "xi", value: xi });
        }
        if !eta.is_finite() {
            return Err(Error::InvalidAngle { name: "eta", value: eta });
        }
        let xi = reduce_angle(xi);
        let eta = reduce_angle(eta);
        let (sx, cx) = xi.sin_cos();
        Ok(CatState {
            n,
            s,
            xi,
            eta,
            c1: C64::from_polar(1.0, eta) * sx,
            c2: C64::from_polar(1.0, -eta) * cx,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spin(&self) -> HalfInteger {
        self.s
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn c1(&self) -> C64 {
        self.c1
    }

    pub fn c2(&self) -> C64 {
        self.c2
    }

    /// Same state with a different particle count.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        CatState::new(n, self.s, self.xi, self.eta)
    }

    /// `(2s+1)^n`, checked against `cap`.
    pub fn hilbert_dim(&self, cap: DimCap) -> Result<usize> {
        cap.power(self.s.dim(), self.n)
    }

    /// `|ψ⟩` as a dense vector.
    pub fn state_vector(&self, cap: DimCap) -> Result<StateVector> {
        let plus = product_ket(self.s, self.n, false, cap)?;
        let minus = product_ket(self.s, self.n, true, cap)?;
        plus.scale(self.c1).add(&minus.scale(self.c2))
    }
}

/// Free-function spelling of [`CatState::new`].
pub fn make_cat_state(n: usize, s: HalfInteger, xi: f64, eta: f64) -> Result<CatState> {
    CatState::new(n, s, xi, eta)
}

/// `|+s⟩^⊗n` or `|−s⟩^⊗n` in the z basis.
pub fn product_ket(s: HalfInteger, n: usize, minus: bool, cap: DimCap) -> Result<StateVector> {
    let d = s.dim();
    let dim = cap.power(d, n)?;
    // |−s⟩ is the last basis vector on every site, so its product index is
    // Σ (d−1)·d^k = d^n − 1.
    let index = if minus { dim - 1 } else { 0 };
    Ok(StateVector::basis(dim, index))
}

/// `ρ = Σ_ab w_ab |a⟩⟨b|` over the product kets `a, b ∈ {+, −}`.
///
/// The diagonal weights form the local part and the cross weights the
/// non-local part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityParts {
    /// `|c1|² = sin²ξ` and `|c2|² = cos²ξ`.
    pub local: [f64; 2],
    /// Weight of `|+⟩⟨−|`, i.e. `c1 c2* = sin ξ cos ξ e^{2iη}`.
    /// The `|−⟩⟨+|` weight is its conjugate.
    pub nonlocal: C64,
}

impl DensityParts {
    pub fn new(cat: &CatState) -> Self {
        DensityParts {
            local: [cat.c1.norm_sqr(), cat.c2.norm_sqr()],
            nonlocal: cat.c1 * cat.c2.conj(),
        }
    }

    pub fn weight(&self, a_minus: bool, b_minus: bool) -> C64 {
        match (a_minus, b_minus) {
            (false, false) => C64::new(self.local[0], 0.0),
            (true, true) => C64::new(self.local[1], 0.0),
            (false, true) => self.nonlocal,
            (true, false) => self.nonlocal.conj(),
        }
    }

    pub fn materialize_local(&self, s: HalfInteger, n: usize, cap: DimCap) -> Result<ComplexMatrix> {
        let plus = product_ket(s, n, false, cap)?;
        let minus = product_ket(s, n, true, cap)?;
        plus.outer(&plus)
            .scale(C64::new(self.local[0], 0.0))
            .add(&minus.outer(&minus).scale(C64::new(self.local[1], 0.0)))
    }

    pub fn materialize_nonlocal(&self, s: HalfInteger, n: usize, cap: DimCap) -> Result<ComplexMatrix> {
        let plus = product_ket(s, n, false, cap)?;
        let minus = product_ket(s, n, true, cap)?;
        plus.outer(&minus)
            .scale(self.nonlocal)
            .add(&minus.outer(&plus).scale(self.nonlocal.conj()))
    }
}

pub fn density_parts(cat: &CatState) -> DensityParts {
    DensityParts::new(cat)
}

/// `(Π⟨ketᵢ|+s⟩, Π⟨ketᵢ|−s⟩)`.
pub fn component_overlaps(cat: &CatState, kets: &[&StateVector]) -> Result<(C64, C64)> {
    if kets.len() != cat.n {
        return Err(Error::DirectionCount { expected: cat.n, found: kets.len() });
    }
    let d = cat.s.dim();
    let mut a = C64::new(1.0, 0.0);
    let mut b = C64::new(1.0, 0.0);
    for ket in kets {
        if ket.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: ket.dim() });
        }
        let amps = ket.amplitudes();
        a *= amps[0].conj();
        b *= amps[d - 1].conj();
    }
    Ok((a, b))
}

/// `⟨⊗ᵢ ketᵢ | ψ⟩ = c1 Π⟨ketᵢ|+s⟩ + c2 Π⟨ketᵢ|−s⟩`.
pub fn amplitude_in_basis(cat: &CatState, kets: &[&StateVector]) -> Result<C64> {
    let (a, b) = component_overlaps(cat, kets)?;
    Ok(cat.c1 * a + cat.c2 * b)
}

/// All ordered `n`-tuples over `0..d`, last site fastest.
pub(crate) fn for_each_tuple(d: usize, n: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = alloc::vec![0; n];
    loop {
        f(&idx);
        let mut site = n;
        loop {
            if site == 0 {
                return;
            }
            site -= 1;
            idx[site] += 1;
            if idx[site] < d {
                break;
            }
            idx[site] = 0;
        }
    }
}
