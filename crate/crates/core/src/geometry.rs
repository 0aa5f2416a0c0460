//! The marked sphere: in-points `P_1, …, P_K` in the affine chart, the single
//! out-point at `∞`, cycle classes over the in-point circles, and the
//! projective and affine connections used by the cocycles.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::Gr;
use crate::ratfunc::{ExtendedPoint, RationalFunction};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("at least one in-point is required")]
    NoInPoints,
    #[error("in-points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("cycle has {got} multiplicities, geometry has {expected} in-points")]
    CycleLength { expected: usize, got: usize },
    #[error("point index {0} out of range 1..={1}")]
    PointIndex(usize, usize),
    #[error("invalid {kind} connection: {diagnostics}")]
    InvalidConnection {
        kind: ConnectionKind,
        diagnostics: ConnectionDiagnostics,
    },
    #[error("cannot read geometry file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed geometry JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// The sphere with in-points `I = (P_1, …, P_K)` and out-point `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedSphere {
    in_points: Vec<Gr>,
}

impl MarkedSphere {
    pub fn new(in_points: Vec<Gr>) -> Result<Self, GeometryError> {
        if in_points.is_empty() {
            return Err(GeometryError::NoInPoints);
        }
        for i in 0..in_points.len() {
            for j in i + 1..in_points.len() {
                if in_points[i] == in_points[j] {
                    return Err(GeometryError::DuplicatePoint(i + 1, j + 1));
                }
            }
        }
        Ok(Self { in_points })
    }

    /// One in-point at the origin: the setting of the Witt algebra.
    pub fn classical() -> Self {
        Self {
            in_points: vec![Gr::zero()],
        }
    }

    /// In-points at the given integers.
    pub fn from_integers(points: &[i64]) -> Result<Self, GeometryError> {
        Self::new(points.iter().map(|&p| Gr::from_integer(p)).collect())
    }

    pub fn k(&self) -> usize {
        self.in_points.len()
    }

    pub fn in_points(&self) -> &[Gr] {
        &self.in_points
    }

    /// `P_p` for a 1-based index.
    pub fn point(&self, p: usize) -> &Gr {
        &self.in_points[p - 1]
    }

    pub fn genus(&self) -> u32 {
        0
    }

    pub fn out_point(&self) -> ExtendedPoint {
        ExtendedPoint::Infinity
    }

    pub fn is_in_point(&self, q: &Gr) -> bool {
        self.in_points.contains(q)
    }

    pub fn check_point_index(&self, p: usize) -> Result<(), GeometryError> {
        if p == 0 || p > self.k() {
            return Err(GeometryError::PointIndex(p, self.k()));
        }
        Ok(())
    }
}

/// Integer combination `Σ m_i [C_i]` of small circles around the in-points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleClass {
    multiplicities: Vec<i64>,
}

impl CycleClass {
    pub fn new(geom: &MarkedSphere, multiplicities: Vec<i64>) -> Result<Self, GeometryError> {
        if multiplicities.len() != geom.k() {
            return Err(GeometryError::CycleLength {
                expected: geom.k(),
                got: multiplicities.len(),
            });
        }
        Ok(Self { multiplicities })
    }

    /// The single circle `C_p` (1-based).
    pub fn circle(geom: &MarkedSphere, p: usize) -> Result<Self, GeometryError> {
        geom.check_point_index(p)?;
        let mut m = vec![0; geom.k()];
        m[p - 1] = 1;
        Ok(Self { multiplicities: m })
    }

    pub fn multiplicities(&self) -> &[i64] {
        &self.multiplicities
    }

    pub fn is_separating(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 1)
    }
}

impl fmt::Display for CycleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.multiplicities.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The separating cycle `C_S = Σ C_i`.
pub fn separating_cycle(geom: &MarkedSphere) -> CycleClass {
    CycleClass {
        multiplicities: vec![1; geom.k()],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectionKind {
    Projective,
    Affine,
}

impl fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnectionKind::Projective => write!(f, "projective"),
            ConnectionKind::Affine => write!(f, "affine"),
        }
    }
}

/// One offending point of a connection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectionViolation {
    pub point: String,
    pub order: i64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConnectionDiagnostics {
    pub violations: Vec<ConnectionViolation>,
}

impl ConnectionDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ConnectionDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{} at {} (order {})", v.reason, v.point, v.order))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks that a connection given by its z-chart representative is
/// admissible on the marked sphere.
///
/// Finite poles are rejected everywhere: at an in-point the connection must
/// be holomorphic, and off `A` there is nothing to absorb a pole. At `∞` a
/// projective connection may have any pole (`R_w = R(1/w)/w⁴`, since the
/// Schwarzian of `1/z` vanishes). An affine connection picks up the
/// inhomogeneous term of the chart change, `T_w = -T(1/w)/w² + 2/w`, and
/// may have at most a simple pole there.
pub fn validate_connection(
    kind: ConnectionKind,
    conn: &RationalFunction,
    geom: &MarkedSphere,
) -> ConnectionDiagnostics {
    let mut diag = ConnectionDiagnostics::default();
    if conn.is_zero() {
        return diag;
    }
    let den = conn.den();
    if !den.is_constant() {
        // Locate poles: first at the in-points, then any remaining factor.
        let hinted = conn.with_pole_hints(geom.in_points());
        for q in geom.in_points() {
            let ord = conn.order_at(&ExtendedPoint::Finite(q.clone())).unwrap_or(0);
            if ord < 0 {
                diag.violations.push(ConnectionViolation {
                    point: q.to_string(),
                    order: ord,
                    reason: "pole at in-point".into(),
                });
            }
        }
        if hinted.poles().is_none() {
            let mut rest = den.clone();
            for q in geom.in_points() {
                let m = rest.root_multiplicity(q);
                for _ in 0..m {
                    rest = rest.div_linear(q).0;
                }
            }
            diag.violations.push(ConnectionViolation {
                point: format!("roots of {rest}"),
                order: -(rest.degree().unwrap_or(0) as i64),
                reason: "pole outside the marked points".into(),
            });
        }
    }
    if kind == ConnectionKind::Affine {
        let ord_inf = conn
            .order_at(&ExtendedPoint::Infinity)
            .expect("nonzero connection");
        // ord_w(T(1/w)/w²) = ord_∞(T) - 2; the 2/w term is a simple pole.
        let ord_w = ord_inf - 2;
        let total = if ord_w == -1 {
            // Leading terms may cancel against 2/w; order is then ≥ 0.
            let lead = -conn.local_expansion(&ExtendedPoint::Infinity, 1).coeff(1);
            if lead == Gr::from_integer(-2) {
                0
            } else {
                -1
            }
        } else {
            ord_w.min(-1)
        };
        if total < -1 {
            diag.violations.push(ConnectionViolation {
                point: "oo".into(),
                order: total,
                reason: "affine connection has a pole of order > 1 at the out-point".into(),
            });
        }
    }
    diag
}

/// A marked sphere together with its chosen connections.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub sphere: MarkedSphere,
    pub projective: RationalFunction,
    pub affine: RationalFunction,
}

#[derive(Serialize, Deserialize)]
struct GeometryFile {
    in_points: Vec<Gr>,
    #[serde(default = "zero_connection")]
    projective_connection: RationalFunction,
    #[serde(default = "zero_connection")]
    affine_connection: RationalFunction,
}

fn zero_connection() -> RationalFunction {
    RationalFunction::zero()
}

impl Geometry {
    /// Geometry with the default connections `R = 0`, `T = 0`.
    pub fn with_default_connections(sphere: MarkedSphere) -> Self {
        Self {
            sphere,
            projective: RationalFunction::zero(),
            affine: RationalFunction::zero(),
        }
    }

    pub fn new(
        sphere: MarkedSphere,
        projective: RationalFunction,
        affine: RationalFunction,
    ) -> Result<Self, GeometryError> {
        for (kind, conn) in [
            (ConnectionKind::Projective, &projective),
            (ConnectionKind::Affine, &affine),
        ] {
            let diagnostics = validate_connection(kind, conn, &sphere);
            if !diagnostics.is_valid() {
                return Err(GeometryError::InvalidConnection { kind, diagnostics });
            }
        }
        Ok(Self {
            sphere,
            projective,
            affine,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self, GeometryError> {
        let f: GeometryFile = serde_json::from_str(s)?;
        Self::new(
            MarkedSphere::new(f.in_points)?,
            f.projective_connection,
            f.affine_connection,
        )
    }

    pub fn from_json_file(path: &Path) -> Result<Self, GeometryError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "in_points": self.sphere.in_points().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "projective_connection": self.projective.to_string(),
            "affine_connection": self.affine.to_string(),
        })
    }
}
