use std::cmp::Ordering;
use std::fmt::Debug;

/// Tolerance for identifying geometric atoms.
pub const ATOM_TOL: f64 = 1e-9;

/// Something that can be the atom of a measure.
///
/// `same_atom` is the equality used for merging; `canonical_cmp` is a total
/// order used only to make the lowest-terms representation deterministic.
pub trait Atom: Clone + Debug {
    fn same_atom(&self, other: &Self) -> bool;

    fn canonical_cmp(&self, other: &Self) -> Ordering;
}

macro_rules! exact_atom {
    ($($t:ty),*) => {
        $(
            impl Atom for $t {
                fn same_atom(&self, other: &Self) -> bool {
                    self == other
                }

                fn canonical_cmp(&self, other: &Self) -> Ordering {
                    self.cmp(other)
                }
            }
        )*
    };
}

exact_atom!(
    u8,
    u16,
    u32,
    u64,
    usize,
    i32,
    i64,
    char,
    String,
    &'static str
);

impl<A: Atom, B: Atom> Atom for (A, B) {
    fn same_atom(&self, other: &Self) -> bool {
        self.0.same_atom(&other.0) && self.1.same_atom(&other.1)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.0
            .canonical_cmp(&other.0)
            .then_with(|| self.1.canonical_cmp(&other.1))
    }
}

impl<A: Atom> Atom for Vec<A> {
    fn same_atom(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().zip(other).all(|(a, b)| a.same_atom(b))
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.iter()
                .zip(other)
                .map(|(a, b)| a.canonical_cmp(b))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    }
}
