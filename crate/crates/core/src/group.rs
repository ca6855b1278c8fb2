//! Signature groups: the cyclic group of k-th roots of unity and the unit circle.
//!
//! Cyclic elements are stored as exact integer exponents so that products,
//! inverses and cycle signatures never accumulate rounding error. Circle
//! elements are stored as an angle in `[0, 2π)`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used when comparing circle-valued elements.
pub const CIRCLE_EQ_TOL: f64 = 1e-12;

/// Which group a signature takes values in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    /// `S¹ₖ = {ξʲ}` with `ξ = e^{2πi/k}`.
    Cyclic(u32),
    /// The full unit circle `S¹`.
    Circle,
}

impl Group {
    pub fn cyclic(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("cyclic group order must be at least 1".into()));
        }
        Ok(Group::Cyclic(k))
    }

    pub fn identity(self) -> GroupElement {
        match self {
            Group::Cyclic(k) => GroupElement::Cyclic { exponent: 0, order: k },
            Group::Circle => GroupElement::Circle { angle: 0.0 },
        }
    }

    pub fn is_continuous(self) -> bool {
        matches!(self, Group::Circle)
    }

    /// Constant from the key averaging lemma: 3 for cyclic groups, 2 for the circle.
    pub fn coarea_factor(self) -> f64 {
        match self {
            Group::Cyclic(_) => 3.0,
            Group::Circle => 2.0,
        }
    }

    pub fn contains(self, g: &GroupElement) -> bool {
        g.group() == self
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Cyclic(k) => write!(f, "S1_{k}"),
            Group::Circle => write!(f, "S1"),
        }
    }
}

/// An element of `S¹ₖ` or `S¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupElement {
    /// `e^{2πi·exponent/order}` with `0 ≤ exponent < order`.
    Cyclic { exponent: u32, order: u32 },
    /// `e^{i·angle}` with `angle ∈ [0, 2π)`.
    Circle { angle: f64 },
}

fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl GroupElement {
    /// `ξʲ` in `S¹ₖ`; the exponent may be any integer and is reduced mod `k`.
    pub fn cyclic(exponent: i64, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("cyclic group order must be at least 1".into()));
        }
        let e = exponent.rem_euclid(order as i64) as u32;
        Ok(GroupElement::Cyclic { exponent: e, order })
    }

    /// `e^{iθ}` in `S¹`. Non-finite angles are rejected.
    pub fn circle(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite angle {angle}")));
        }
        Ok(GroupElement::Circle { angle: wrap_angle(angle) })
    }

    /// `e^{2πi·turns}` in `S¹`.
    pub fn from_turns(turns: f64) -> Result<Self> {
        if !turns.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite angle {turns} turns")));
        }
        Self::circle(turns.rem_euclid(1.0) * TAU)
    }

    pub fn group(&self) -> Group {
        match *self {
            GroupElement::Cyclic { order, .. } => Group::Cyclic(order),
            GroupElement::Circle { .. } => Group::Circle,
        }
    }

    /// Argument in radians, in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        match *self {
            GroupElement::Cyclic { exponent, order } => TAU * exponent as f64 / order as f64,
            GroupElement::Circle { angle } => angle,
        }
    }

    pub fn turns(&self) -> f64 {
        match *self {
            GroupElement::Cyclic { exponent, order } => exponent as f64 / order as f64,
            GroupElement::Circle { angle } => angle / TAU,
        }
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        match (*self, *other) {
            (GroupElement::Cyclic { exponent: a, order: k }, GroupElement::Cyclic { exponent: b, order: l })
                if k == l =>
            {
                Ok(GroupElement::Cyclic { exponent: ((a as u64 + b as u64) % k as u64) as u32, order: k })
            }
            (GroupElement::Circle { angle: a }, GroupElement::Circle { angle: b }) => {
                Ok(GroupElement::Circle { angle: wrap_angle(a + b) })
            }
            _ => Err(Error::WrongGroup),
        }
    }

    pub fn inv(&self) -> GroupElement {
        match *self {
            GroupElement::Cyclic { exponent, order } => {
                GroupElement::Cyclic { exponent: if exponent == 0 { 0 } else { order - exponent }, order }
            }
            GroupElement::Circle { angle } => GroupElement::Circle { angle: wrap_angle(-angle) },
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match *self {
            GroupElement::Cyclic { exponent, order } => {
                // quarter turns are represented exactly
                let four_j = 4 * exponent as u64;
                if four_j.is_multiple_of(order as u64) {
                    return match (four_j / order as u64) % 4 {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    };
                }
                Complex64::from_polar(1.0, self.angle())
            }
            GroupElement::Circle { angle } => Complex64::from_polar(1.0, angle),
        }
    }

    /// `|1 − g|`, via `2 sin(πj/k)` or `2|sin(θ/2)|` rather than a complex round trip.
    pub fn distance_to_one(&self) -> f64 {
        match *self {
            GroupElement::Cyclic { exponent, order } => chord(exponent, order),
            GroupElement::Circle { angle } => 2.0 * (angle / 2.0).sin().abs(),
        }
    }

    pub fn is_identity(&self) -> bool {
        match *self {
            GroupElement::Cyclic { exponent, .. } => exponent == 0,
            GroupElement::Circle { angle } => angle <= CIRCLE_EQ_TOL || TAU - angle <= CIRCLE_EQ_TOL,
        }
    }

    /// Group equality: exact for cyclic elements, within [`CIRCLE_EQ_TOL`] on the circle.
    pub fn same_as(&self, other: &GroupElement) -> bool {
        match (*self, *other) {
            (GroupElement::Cyclic { exponent: a, order: k }, GroupElement::Cyclic { exponent: b, order: l }) => {
                k == l && a == b
            }
            (GroupElement::Circle { .. }, GroupElement::Circle { .. }) => {
                self.mul(&other.inv()).map(|d| d.is_identity()).unwrap_or(false)
            }
            _ => false,
        }
    }

    /// Round a circle element to the nearest element of `S¹ₖ`.
    pub fn discretize(&self, k: u32) -> Result<GroupElement> {
        if k == 0 {
            return Err(Error::InvalidArgument("cyclic group order must be at least 1".into()));
        }
        let j = (self.turns() * k as f64).round() as i64;
        GroupElement::cyclic(j, k)
    }

    /// Reinterpret a cyclic element as a point of the circle.
    pub fn to_circle(&self) -> GroupElement {
        GroupElement::Circle { angle: self.angle() }
    }
}

/// `|1 − ξʲ| = 2 sin(πj/k)` for the primitive k-th root ξ.
pub fn chord(j: u32, k: u32) -> f64 {
    if j.is_multiple_of(k) {
        0.0
    } else {
        2.0 * (PI * (j % k) as f64 / k as f64).sin()
    }
}

/// Table of `|1 − ξʲ|` for `j = 0..k`.
pub fn chord_table(k: u32) -> Vec<f64> {
    (0..k).map(|j| chord(j, k)).collect()
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupElement::Cyclic { exponent, order } => write!(f, "ξ^{exponent} (k={order})"),
            GroupElement::Circle { angle } => write!(f, "e^(i·{angle})"),
        }
    }
}
