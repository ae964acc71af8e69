//! The Hermitian curve `x^(q+1) = y^q + y` over `F_{q^2}`.

mod basis;
mod divisor;
mod function;

pub use basis::{
    build_h, info_basis, interpolation_basis, one_point_basis, two_point_monomial_set,
    write_basis_csv, BasisElement,
    MonomialIndex, TwoPointSet,
};
pub use divisor::Divisor;
pub use function::{BiPoly, CurveFunction, FactoredFunction};

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldTower};

/// A rational point of the curve. Also used as a place in divisors.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum CurvePoint {
    Affine { x: FieldElement, y: FieldElement },
    Infinity,
}

pub type Place = CurvePoint;

impl CurvePoint {
    pub fn affine(x: FieldElement, y: FieldElement) -> Self {
        CurvePoint::Affine { x, y }
    }

    /// The place `P_0 = (0, 0)`.
    pub fn origin() -> Self {
        CurvePoint::Affine {
            x: FieldElement::ZERO,
            y: FieldElement::ZERO,
        }
    }

    pub fn is_origin(&self) -> bool {
        *self == Self::origin()
    }

    pub fn coords(&self) -> Option<(FieldElement, FieldElement)> {
        match *self {
            CurvePoint::Affine { x, y } => Some((x, y)),
            CurvePoint::Infinity => None,
        }
    }

    pub fn x(&self) -> Option<FieldElement> {
        self.coords().map(|c| c.0)
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "P_inf"),
            CurvePoint::Affine { x, y } => write!(f, "({}, {})", x.index(), y.index()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HermitianCurve {
    tower: FieldTower,
    /// trace value -> all y with y^q + y = value, in enumeration order
    trace_fibers: HashMap<FieldElement, Vec<FieldElement>>,
}

impl HermitianCurve {
    pub fn new(q: u64) -> Result<Self> {
        Ok(Self::from_tower(FieldTower::for_q(q)?))
    }

    pub fn from_tower(tower: FieldTower) -> Self {
        let mut trace_fibers: HashMap<FieldElement, Vec<FieldElement>> = HashMap::new();
        for y in tower.elements() {
            trace_fibers.entry(tower.subfield_trace(y)).or_default().push(y);
        }
        HermitianCurve {
            tower,
            trace_fibers,
        }
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn q(&self) -> u32 {
        self.tower.q()
    }

    pub fn genus(&self) -> u32 {
        let q = self.q();
        q * (q - 1) / 2
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match *p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                self.tower.subfield_norm(x) == self.tower.subfield_trace(y)
            }
        }
    }

    /// `{ y : y^q + y = alpha^(q+1) }`, always of size `q`.
    pub fn fiber_of_x(&self, alpha: FieldElement) -> Vec<FieldElement> {
        self.trace_fibers
            .get(&self.tower.subfield_norm(alpha))
            .cloned()
            .unwrap_or_default()
    }

    pub fn fiber_points(&self, alpha: FieldElement) -> Vec<CurvePoint> {
        self.fiber_of_x(alpha)
            .into_iter()
            .map(|y| CurvePoint::affine(alpha, y))
            .collect()
    }

    /// All `q^3` affine points ordered by `(x, y)` encoding.
    pub fn affine_points(&self) -> Vec<CurvePoint> {
        self.tower
            .elements()
            .flat_map(|x| self.fiber_points(x))
            .collect()
    }

    /// The affine points followed by `P_inf`.
    pub fn enumerate_points(&self) -> Vec<CurvePoint> {
        let mut pts = self.affine_points();
        pts.push(CurvePoint::Infinity);
        pts
    }

    /// CSV dump with one row per affine point: x and y coordinates over `F_p`.
    pub fn write_points_csv<W: Write>(&self, points: &[CurvePoint], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y"]).map_err(csv_err)?;
        for p in points {
            let (x, y) = p.coords().ok_or(Error::EvaluationAtInfinity)?;
            w.write_record([self.tower.format(x), self.tower.format(y)])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}
