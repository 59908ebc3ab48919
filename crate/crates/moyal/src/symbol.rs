//! Phase-space symbols in their three concrete forms (grid samples,
//! polynomials, Gaussian exponentials), sampling between them, and the
//! serialization formats: JSON for the parametric variants, the "MOYL"
//! little-endian binary format for grids.

use crate::error::{Flagged, GridWarning, MoyalError, Result};
use crate::gaussian::Gaussian;
use crate::grid::PhaseGrid;
use crate::linalg::CMat;
use crate::multi_index::MultiIndex;
use crate::poly::Polynomial;
use crate::scalar::{re, CNum, Scalar};
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use std::io::{Read, Write};

/// Boundary/peak ratio above which a sampled Gaussian is flagged.
pub const GRID_WARN_RATIO: f64 = 1e-6;
/// Boundary/peak ratio at or below which the grid is recorded as adequate.
pub const GRID_ADEQUATE_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum Symbol<T: Scalar> {
    Grid(GridSymbol<T>),
    Polynomial(Polynomial<T>),
    Gaussian(Gaussian<T>),
}

impl<T: Scalar> Symbol<T> {
    pub fn dim(&self) -> usize {
        match self {
            Symbol::Grid(g) => g.grid().dim(),
            Symbol::Polynomial(p) => p.dim(),
            Symbol::Gaussian(g) => g.dim(),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Symbol::Grid(_) => "grid",
            Symbol::Polynomial(_) => "polynomial",
            Symbol::Gaussian(_) => "gaussian",
        }
    }

    /// Pointwise complex conjugate (the involution on symbols).
    pub fn conj(&self) -> Symbol<T> {
        match self {
            Symbol::Grid(g) => Symbol::Grid(g.map(|z| z.conj())),
            Symbol::Polynomial(p) => Symbol::Polynomial(p.conj()),
            Symbol::Gaussian(g) => Symbol::Gaussian(g.conj()),
        }
    }

    /// Exact evaluation for the parametric variants.
    pub fn eval_exact(&self, x: &[T]) -> Result<CNum<T>> {
        match self {
            Symbol::Polynomial(p) => Ok(p.eval(x)),
            Symbol::Gaussian(g) => Ok(g.eval(x)),
            Symbol::Grid(_) => Err(MoyalError::Representation(
                "grid symbols have no exact pointwise rule; sample or interpolate".into(),
            )),
        }
    }
}

/// Complex samples on a phase grid, in ascending coordinate order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSymbol<T: Scalar> {
    grid: PhaseGrid<T>,
    values: Vec<CNum<T>>,
}

impl<T: Scalar> GridSymbol<T> {
    pub fn new(grid: PhaseGrid<T>, values: Vec<CNum<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(MoyalError::Construction(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MoyalError::Construction("grid values must be finite".into()));
        }
        Ok(GridSymbol { grid, values })
    }

    pub fn from_fn(grid: &PhaseGrid<T>, f: impl Fn(&[T]) -> CNum<T>) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.node(i))).collect();
        Self::new(grid.clone(), values)
    }

    pub fn zeros(grid: &PhaseGrid<T>) -> Self {
        GridSymbol {
            grid: grid.clone(),
            values: vec![CNum::new(T::zero(), T::zero()); grid.len()],
        }
    }

    pub fn grid(&self) -> &PhaseGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[CNum<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [CNum<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<CNum<T>> {
        self.values
    }

    pub fn map(&self, f: impl Fn(CNum<T>) -> CNum<T>) -> Self {
        GridSymbol {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(MoyalError::GridMismatch);
        }
        Ok(GridSymbol {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(re(-T::one())))
    }

    pub fn scale(&self, s: CNum<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(MoyalError::GridMismatch);
        }
        Ok(GridSymbol {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a * b)
                .collect(),
        })
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn sup_diff(&self, other: &Self) -> Result<T> {
        if self.grid != other.grid {
            return Err(MoyalError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    /// Trapezoid quadrature ∫ f dx = Δ^d Σ f on the periodic box.
    pub fn integral(&self) -> CNum<T> {
        let sum = self
            .values
            .iter()
            .fold(CNum::new(T::zero(), T::zero()), |a, &b| a + b);
        sum * re(self.grid.cell_volume())
    }

    /// Largest |value| on the boundary shell.
    pub fn boundary_max(&self) -> T {
        (0..self.grid.len())
            .filter(|&i| self.grid.is_boundary(i))
            .map(|i| self.values[i].norm())
            .fold(T::zero(), T::max)
    }

    /// Σ_boundary |f| Δ^d / Σ_all |f| Δ^d.
    pub fn boundary_mass_ratio(&self) -> T {
        let mut total = T::zero();
        let mut boundary = T::zero();
        for i in 0..self.grid.len() {
            let v = self.values[i].norm();
            total = total + v;
            if self.grid.is_boundary(i) {
                boundary = boundary + v;
            }
        }
        if total > T::zero() {
            boundary / total
        } else {
            T::zero()
        }
    }
}

/// Result of sampling, with the boundary-decay metadata the grid-adequacy
/// checks rely on.
#[derive(Debug, Clone)]
pub struct Sampled<T: Scalar> {
    pub symbol: GridSymbol<T>,
    /// max |f| over boundary nodes divided by max |f| over all nodes.
    pub boundary_ratio: T,
    /// True when the boundary tail is below 1e−14 of the peak.
    pub adequate: bool,
    pub warnings: Vec<GridWarning>,
}

/// Pointwise evaluation of a symbol at all nodes of `grid`. Gaussians whose
/// boundary value exceeds 1e−6 of their peak are flagged with a
/// `GridWarning::TooSmall` (the samples are still returned).
pub fn sample<T: Scalar>(f: &Symbol<T>, grid: &PhaseGrid<T>) -> Result<Sampled<T>> {
    if f.dim() != grid.dim() {
        return Err(MoyalError::Representation(format!(
            "symbol dimension {} does not match grid dimension {}",
            f.dim(),
            grid.dim()
        )));
    }
    let symbol = match f {
        Symbol::Grid(g) => {
            if g.grid() != grid {
                return Err(MoyalError::GridMismatch);
            }
            g.clone()
        }
        Symbol::Polynomial(p) => GridSymbol::from_fn(grid, |x| p.eval(x))?,
        Symbol::Gaussian(g) => GridSymbol::from_fn(grid, |x| g.eval(x))?,
    };
    let peak = symbol.sup_norm();
    let boundary = symbol.boundary_max();
    let boundary_ratio = if peak > T::zero() { boundary / peak } else { T::zero() };
    let adequate = boundary_ratio <= T::of(GRID_ADEQUATE_RATIO);
    let mut warnings = Vec::new();
    if matches!(f, Symbol::Gaussian(_)) && boundary_ratio > T::of(GRID_WARN_RATIO) {
        warnings.push(GridWarning::TooSmall {
            boundary_ratio: boundary_ratio.to_f64().unwrap_or(f64::NAN),
            context: "sampled Gaussian".into(),
        });
    }
    Ok(Sampled { symbol, boundary_ratio, adequate, warnings })
}

/// Sample any symbol variant onto a grid, returning the samples and
/// propagating warnings into `sink`.
pub fn sample_into<T: Scalar>(
    f: &Symbol<T>,
    grid: &PhaseGrid<T>,
    sink: &mut Vec<GridWarning>,
) -> Result<GridSymbol<T>> {
    let s = sample(f, grid)?;
    sink.extend(s.warnings);
    Ok(s.symbol)
}

/// sample(af + bg) as a flagged linear combination, used by tests of the
/// sampling linearity property.
pub fn sample_linear_combination<T: Scalar>(
    a: CNum<T>,
    f: &Symbol<T>,
    b: CNum<T>,
    g: &Symbol<T>,
    grid: &PhaseGrid<T>,
) -> Result<Flagged<GridSymbol<T>>> {
    let mut warnings = Vec::new();
    let fs = sample_into(f, grid, &mut warnings)?;
    let gs = sample_into(g, grid, &mut warnings)?;
    Ok(Flagged::with(fs.scale(a).add(&gs.scale(b))?, warnings))
}

// --- JSON serialization of the parametric variants ---

fn cnum_to_json<T: Scalar>(z: &CNum<T>) -> serde_json::Value {
    serde_json::json!([
        z.re.to_f64().expect("finite value"),
        z.im.to_f64().expect("finite value")
    ])
}

fn cnum_from_json<T: Scalar>(v: &serde_json::Value) -> Result<CNum<T>> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| MoyalError::Config("complex value must be a [re, im] pair".into()))?;
    let get = |i: usize| -> Result<T> {
        arr[i]
            .as_f64()
            .and_then(T::from_f64)
            .ok_or_else(|| MoyalError::Config("complex component must be a number".into()))
    };
    Ok(CNum::new(get(0)?, get(1)?))
}

pub fn symbol_to_json<T: Scalar>(s: &Symbol<T>) -> Result<serde_json::Value> {
    match s {
        Symbol::Polynomial(p) => {
            let coeffs: serde_json::Map<String, serde_json::Value> = p
                .coeffs()
                .iter()
                .map(|(n, c)| (n.to_key(), cnum_to_json(c)))
                .collect();
            Ok(serde_json::json!({
                "type": "polynomial",
                "d": p.dim(),
                "coeffs": coeffs,
            }))
        }
        Symbol::Gaussian(g) => {
            let d = g.dim();
            let m: Vec<Vec<serde_json::Value>> = (0..d)
                .map(|i| (0..d).map(|j| cnum_to_json(&g.quadratic()[(i, j)])).collect())
                .collect();
            let b: Vec<serde_json::Value> = g.linear().iter().map(cnum_to_json).collect();
            Ok(serde_json::json!({
                "type": "gaussian",
                "m": m,
                "b": b,
                "c": cnum_to_json(&g.constant()),
            }))
        }
        Symbol::Grid(_) => Err(MoyalError::Representation(
            "grid symbols use the binary format, not JSON".into(),
        )),
    }
}

pub fn symbol_from_json<T: Scalar>(v: &serde_json::Value) -> Result<Symbol<T>> {
    let ty = v
        .get("type")
        .and_then(|t| t.as_str())
        .ok_or_else(|| MoyalError::Config("symbol needs a \"type\" field".into()))?;
    match ty {
        "polynomial" => {
            let d = v
                .get("d")
                .and_then(|x| x.as_u64())
                .ok_or_else(|| MoyalError::Config("polynomial needs \"d\"".into()))?
                as usize;
            let coeffs = v
                .get("coeffs")
                .and_then(|c| c.as_object())
                .ok_or_else(|| MoyalError::Config("polynomial needs \"coeffs\" map".into()))?;
            let mut pairs = Vec::new();
            for (key, val) in coeffs {
                let n = MultiIndex::from_key(key).ok_or_else(|| {
                    MoyalError::Config(format!("bad multi-index key \"{key}\""))
                })?;
                pairs.push((n, cnum_from_json(val)?));
            }
            Ok(Symbol::Polynomial(Polynomial::from_coeffs(d, pairs)?))
        }
        "gaussian" => {
            let m_rows = v
                .get("m")
                .and_then(|m| m.as_array())
                .ok_or_else(|| MoyalError::Config("gaussian needs \"m\" matrix".into()))?;
            let d = m_rows.len();
            let mut m = CMat::zeros(d);
            for (i, row) in m_rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .filter(|r| r.len() == d)
                    .ok_or_else(|| MoyalError::Config("gaussian \"m\" must be square".into()))?;
                for (j, entry) in row.iter().enumerate() {
                    m[(i, j)] = cnum_from_json(entry)?;
                }
            }
            let b_arr = v
                .get("b")
                .and_then(|b| b.as_array())
                .filter(|b| b.len() == d)
                .ok_or_else(|| MoyalError::Config("gaussian needs \"b\" of length d".into()))?;
            let b: Result<Vec<CNum<T>>> = b_arr.iter().map(cnum_from_json).collect();
            let c = cnum_from_json(
                v.get("c").ok_or_else(|| MoyalError::Config("gaussian needs \"c\"".into()))?,
            )?;
            Ok(Symbol::Gaussian(Gaussian::new(m, b?, c)?))
        }
        other => Err(MoyalError::Config(format!("unknown symbol type \"{other}\""))),
    }
}

// --- binary grid format ---
// little-endian: magic "MOYL", version u32, d u32, N u32, L f64,
// then N^d complex128 values (re, im) in row-major order.

const MOYL_MAGIC: &[u8; 4] = b"MOYL";
const MOYL_VERSION: u32 = 1;

pub fn write_grid_symbol<T: Scalar, W: Write>(s: &GridSymbol<T>, w: &mut W) -> Result<()> {
    w.write_all(MOYL_MAGIC)?;
    w.write_u32::<LittleEndian>(MOYL_VERSION)?;
    w.write_u32::<LittleEndian>(s.grid().dim() as u32)?;
    w.write_u32::<LittleEndian>(s.grid().points_per_axis() as u32)?;
    w.write_f64::<LittleEndian>(s.grid().half_extent().to_f64().unwrap())?;
    for z in s.values() {
        w.write_f64::<LittleEndian>(z.re.to_f64().unwrap())?;
        w.write_f64::<LittleEndian>(z.im.to_f64().unwrap())?;
    }
    Ok(())
}

pub fn read_grid_symbol<T: Scalar, R: Read>(r: &mut R) -> Result<GridSymbol<T>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MOYL_MAGIC {
        return Err(MoyalError::Config("bad magic in grid file".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != MOYL_VERSION {
        return Err(MoyalError::Config(format!("unsupported grid format version {version}")));
    }
    let d = r.read_u32::<LittleEndian>()? as usize;
    let n = r.read_u32::<LittleEndian>()? as usize;
    let l = r.read_f64::<LittleEndian>()?;
    let grid = PhaseGrid::new(
        d,
        T::from_f64(l).ok_or_else(|| MoyalError::Config("bad L".into()))?,
        n,
    )?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re_ = r.read_f64::<LittleEndian>()?;
        let im_ = r.read_f64::<LittleEndian>()?;
        values.push(CNum::new(
            T::from_f64(re_).ok_or_else(|| MoyalError::Config("bad value".into()))?,
            T::from_f64(im_).ok_or_else(|| MoyalError::Config("bad value".into()))?,
        ));
    }
    GridSymbol::new(grid, values)
}
