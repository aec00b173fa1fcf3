//! Coordinate vectors tagged by basis: weights (ρ_i), roots (α_i),
//! coweights (ρ_i∨) and coroots (α_i∨).

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use serde::{Deserialize, Serialize};

macro_rules! lattice_vec {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub Vec<i64>);

        impl $name {
            pub fn zero(n: usize) -> Self {
                $name(vec![0; n])
            }

            pub fn unit(n: usize, i: usize) -> Self {
                let mut v = vec![0; n];
                v[i] = 1;
                $name(v)
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&v| v == 0)
            }

            pub fn as_slice(&self) -> &[i64] {
                &self.0
            }

            pub fn scale(&self, k: i64) -> Self {
                $name(self.0.iter().map(|v| v * k).collect())
            }

            pub fn is_nonnegative(&self) -> bool {
                self.0.iter().all(|&v| v >= 0)
            }

            pub fn height(&self) -> i64 {
                self.0.iter().sum()
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, o: &$name) -> $name {
                assert_eq!(self.len(), o.len());
                $name(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, o: &$name) -> $name {
                assert_eq!(self.len(), o.len());
                $name(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, o: $name) -> $name {
                &self + &o
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, o: $name) -> $name {
                &self - &o
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                $name(self.0.iter().map(|v| -v).collect())
            }
        }

        impl Index<usize> for $name {
            type Output = i64;
            fn index(&self, i: usize) -> &i64 {
                &self.0[i]
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    };
}

lattice_vec!(
    /// Coordinates in the fundamental weights ρ_i (the lattice P).
    WeightVec
);
lattice_vec!(
    /// Coordinates in the simple roots α_i (the lattice Q).
    RootVec
);
lattice_vec!(
    /// Coordinates in the fundamental coweights ρ_i∨ (the lattice P∨).
    CoweightVec
);
lattice_vec!(
    /// Coordinates in the simple coroots α_i∨ (the lattice Q∨).
    CorootVec
);

/// Pairing ⟨λ, β∨⟩ of a weight with a coroot.
pub fn pair_weight_coroot(l: &WeightVec, c: &CorootVec) -> i64 {
    l.0.iter().zip(&c.0).map(|(a, b)| a * b).sum()
}

/// Pairing ⟨ρ∨, β⟩ of a coweight with a root.
pub fn pair_coweight_root(l: &CoweightVec, r: &RootVec) -> i64 {
    l.0.iter().zip(&r.0).map(|(a, b)| a * b).sum()
}
