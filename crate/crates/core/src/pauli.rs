//! Signed n-qubit Pauli operators in the binary symplectic representation.
//!
//! A Pauli string is stored as two packed bit vectors (`x` and `z`) plus one
//! sign bit. Only the hermitian representatives `±P` are representable; the
//! `±i` phases of the full Pauli group never arise when hermitian Paulis are
//! conjugated by Clifford gates.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const WORD: usize = 64;
const EVEN_BITS: u64 = 0x5555_5555_5555_5555;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("cannot parse Pauli string {0:?}")]
    Parse(String),
}

/// Single-qubit Pauli letter. The discriminant is the 2-bit code `x + 2z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Z = 2,
    Y = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Z, Pauli::Y];
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Z, Pauli::Y];

    #[inline]
    pub fn from_code(code: u8) -> Pauli {
        match code & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Z,
            _ => Pauli::Y,
        }
    }

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        Pauli::from_code(x as u8 | (z as u8) << 1)
    }

    #[inline]
    pub fn code(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn x(self) -> bool {
        self as u8 & 1 == 1
    }

    #[inline]
    pub fn z(self) -> bool {
        self as u8 & 2 == 2
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Z => 'Z',
            Pauli::Y => 'Y',
        }
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Packed label of an unsigned Pauli on a small ordered support.
///
/// Slot `j` of the support occupies bits `2j` (x) and `2j + 1` (z), so a
/// single-qubit label indexes `(I, X, Z, Y)` and channel vectors are laid out
/// as tensor products with slot 0 fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliIndex(pub u16);

impl PauliIndex {
    pub const IDENTITY: PauliIndex = PauliIndex(0);

    pub fn from_paulis(paulis: &[Pauli]) -> PauliIndex {
        PauliIndex(
            paulis
                .iter()
                .enumerate()
                .fold(0u16, |acc, (slot, p)| acc | (p.code() as u16) << (2 * slot)),
        )
    }

    #[inline]
    pub fn value(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn slot(self, slot: usize) -> Pauli {
        Pauli::from_code((self.0 >> (2 * slot)) as u8)
    }

    #[inline]
    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    /// Number of labels on a `k`-qubit support.
    #[inline]
    pub fn count(k: usize) -> usize {
        1 << (2 * k)
    }

    /// Binary symplectic form between two labels on the same support.
    #[inline]
    pub fn symplectic(self, other: PauliIndex) -> bool {
        let a = self.0 as u64;
        let b = other.0 as u64;
        let swapped = ((b & EVEN_BITS) << 1) | ((b >> 1) & EVEN_BITS);
        (a & swapped).count_ones() & 1 == 1
    }

    pub fn weight(self, k: usize) -> usize {
        (0..k).filter(|&s| self.slot(s) != Pauli::I).count()
    }

    /// Render the label on a `k`-qubit support, slot 0 first.
    pub fn render(self, k: usize) -> String {
        (0..k).map(|s| self.slot(s).letter()).collect()
    }

    pub fn parse(s: &str) -> Result<(PauliIndex, usize), PauliError> {
        let paulis = s
            .chars()
            .map(|c| Pauli::from_letter(c).ok_or_else(|| PauliError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if paulis.is_empty() || paulis.len() > 8 {
            return Err(PauliError::Parse(s.to_string()));
        }
        Ok((PauliIndex::from_paulis(&paulis), paulis.len()))
    }
}

/// Signed hermitian Pauli operator on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

#[inline]
fn words(n: usize) -> usize {
    n.div_ceil(WORD)
}

impl PauliString {
    pub fn identity(n: usize) -> PauliString {
        assert!(n >= 1, "a Pauli string needs at least one qubit");
        PauliString {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            negative: false,
        }
    }

    pub fn single(n: usize, qubit: usize, pauli: Pauli) -> PauliString {
        let mut p = PauliString::identity(n);
        p.set(qubit, pauli);
        p
    }

    pub fn from_paulis(paulis: &[Pauli]) -> PauliString {
        let mut p = PauliString::identity(paulis.len());
        for (q, &pauli) in paulis.iter().enumerate() {
            p.set(q, pauli);
        }
        p
    }

    /// Place a packed label on the given qubits of an otherwise identity string.
    pub fn from_index(n: usize, qubits: &[usize], label: PauliIndex) -> PauliString {
        let mut p = PauliString::identity(n);
        p.set_restricted(qubits, label);
        p
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn with_sign(mut self, negative: bool) -> PauliString {
        self.negative = negative;
        self
    }

    pub fn negate(&mut self) {
        self.negative = !self.negative;
    }

    pub fn unsigned(&self) -> PauliString {
        self.clone().with_sign(false)
    }

    #[inline]
    pub fn get(&self, qubit: usize) -> Pauli {
        debug_assert!(qubit < self.n);
        let (w, b) = (qubit / WORD, qubit % WORD);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    #[inline]
    pub fn set(&mut self, qubit: usize, pauli: Pauli) {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        let (w, b) = (qubit / WORD, qubit % WORD);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | ((pauli.x() as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((pauli.z() as u64) << b);
    }

    /// Label of the restriction of this string to `qubits`, in slot order.
    #[inline]
    pub fn restrict(&self, qubits: &[usize]) -> PauliIndex {
        let mut label = 0u16;
        for (slot, &q) in qubits.iter().enumerate() {
            label |= (self.get(q).code() as u16) << (2 * slot);
        }
        PauliIndex(label)
    }

    #[inline]
    pub fn set_restricted(&mut self, qubits: &[usize], label: PauliIndex) {
        for (slot, &q) in qubits.iter().enumerate() {
            self.set(q, label.slot(slot));
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    /// Number of qubits on which the string acts non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubit indices in the support, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (w, (x, z)) in self.x.iter().zip(&self.z).enumerate() {
            let mut bits = x | z;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(w * WORD + b);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Packed support mask, one bit per qubit.
    pub fn support_mask(&self) -> Vec<u64> {
        self.x.iter().zip(&self.z).map(|(x, z)| x | z).collect()
    }

    fn check_dims(&self, other: &PauliString) -> Result<(), PauliError> {
        if self.n != other.n {
            return Err(PauliError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Binary symplectic form: `true` iff the two operators anticommute.
    pub fn symplectic_inner(&self, other: &PauliString) -> Result<bool, PauliError> {
        self.check_dims(other)?;
        let parity = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .fold(0u32, |acc, ((ax, az), (bx, bz))| {
                acc ^ ((ax & bz) ^ (az & bx)).count_ones()
            });
        Ok(parity & 1 == 1)
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool, PauliError> {
        self.symplectic_inner(other).map(|anti| !anti)
    }

    /// Power of `i` in the exact operator product `self · other = i^k P_c`.
    pub fn product_phase(&self, other: &PauliString) -> Result<u8, PauliError> {
        self.check_dims(other)?;
        let mut exponent: i64 = 2 * (self.negative as i64 + other.negative as i64);
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (y1, xo1, zo1) = (x1 & z1, x1 & !z1, !x1 & z1);
            let (y2, xo2, zo2) = (x2 & z2, x2 & !z2, !x2 & z2);
            let pos = (y1 & zo2) | (xo1 & y2) | (zo1 & xo2);
            let neg = (y1 & xo2) | (xo1 & zo2) | (zo1 & y2);
            exponent += pos.count_ones() as i64 - neg.count_ones() as i64;
        }
        Ok(exponent.rem_euclid(4) as u8)
    }

    /// Operator product with any odd power of `i` dropped: `i·P ↦ +P`, `-i·P ↦ -P`.
    ///
    /// For commuting factors the result is exact.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        let phase = self.product_phase(other)?;
        Ok(PauliString {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            negative: phase >= 2,
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        for q in 0..self.n {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let (negative, body) = if let Some(rest) = trimmed.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = trimmed.strip_prefix('\u{2212}') {
            (true, rest)
        } else if let Some(rest) = trimmed.strip_prefix('+') {
            (false, rest)
        } else {
            (false, trimmed)
        };
        let paulis = body
            .chars()
            .map(|c| Pauli::from_letter(c).ok_or_else(|| PauliError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if paulis.is_empty() {
            return Err(PauliError::Parse(s.to_string()));
        }
        Ok(PauliString::from_paulis(&paulis).with_sign(negative))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn symplectic_examples() {
        assert!(p("X").symplectic_inner(&p("Z")).unwrap());
        assert!(!p("XX").symplectic_inner(&p("ZZ")).unwrap());
        assert!(!p("XYZ").symplectic_inner(&p("XYZ")).unwrap());
        assert_eq!(
            p("X").symplectic_inner(&p("XX")),
            Err(PauliError::DimensionMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn multiply_examples() {
        assert!(p("X").multiply(&p("X")).unwrap().is_identity());
        assert_eq!(p("X").multiply(&p("Z")).unwrap().unsigned(), p("Y"));
        assert_eq!(p("XI").multiply(&p("IZ")).unwrap(), p("XZ"));
        // X·Z = -iY, Z·X = iY
        assert_eq!(p("X").product_phase(&p("Z")).unwrap(), 3);
        assert_eq!(p("Z").product_phase(&p("X")).unwrap(), 1);
        // XX·ZZ = (-iY)(-iY) = -YY
        assert_eq!(p("XX").multiply(&p("ZZ")).unwrap(), p("-YY"));
        assert!(p("X").multiply(&p("XX")).is_err());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(p("III").weight(), 0);
        assert_eq!(p("XIZ").weight(), 2);
        assert_eq!(p("Y").weight(), 1);
        assert_eq!(p("XIZ").support(), vec![0, 2]);
    }

    #[test]
    fn text_round_trip_and_signs() {
        for s in ["XIZ", "-XIZ", "IIII", "-Y"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("\u{2212}XIZ"), p("-XIZ"));
        assert_eq!(p("+XIZ"), p("XIZ"));
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    #[test]
    fn index_layout() {
        assert_eq!(PauliIndex::from_paulis(&[Pauli::X]).0, 1);
        assert_eq!(PauliIndex::from_paulis(&[Pauli::Z]).0, 2);
        assert_eq!(PauliIndex::from_paulis(&[Pauli::I, Pauli::Y]).0, 12);
        let mut s = PauliString::single(67, 1, Pauli::X);
        s.set(66, Pauli::Z);
        let label = s.restrict(&[1, 66]);
        assert_eq!(label.render(2), "XZ");
        assert_eq!(PauliString::from_index(67, &[1, 66], label), s);
    }

    #[test]
    fn index_symplectic_matches_strings() {
        for a in 0..16u16 {
            for b in 0..16u16 {
                let pa = PauliString::from_index(2, &[0, 1], PauliIndex(a));
                let pb = PauliString::from_index(2, &[0, 1], PauliIndex(b));
                assert_eq!(
                    PauliIndex(a).symplectic(PauliIndex(b)),
                    pa.symplectic_inner(&pb).unwrap()
                );
            }
        }
    }

    fn arb_pair(max_n: usize) -> impl Strategy<Value = (PauliString, PauliString, PauliString)> {
        (1..=max_n).prop_flat_map(|n| {
            let one = prop::collection::vec(0u8..4, n)
                .prop_map(|codes| {
                    PauliString::from_paulis(&codes.into_iter().map(Pauli::from_code).collect::<Vec<_>>())
                });
            (one.clone(), one.clone(), one)
        })
    }

    proptest! {
        #[test]
        fn symplectic_is_symmetric_and_alternating((a, b, _) in arb_pair(150)) {
            prop_assert_eq!(a.symplectic_inner(&b).unwrap(), b.symplectic_inner(&a).unwrap());
            prop_assert!(!a.symplectic_inner(&a).unwrap());
        }

        #[test]
        fn product_is_bilinear_and_self_inverse((a, b, c) in arb_pair(150)) {
            let ab = a.multiply(&b).unwrap();
            prop_assert_eq!(
                ab.symplectic_inner(&c).unwrap(),
                a.symplectic_inner(&c).unwrap() ^ b.symplectic_inner(&c).unwrap()
            );
            prop_assert!(a.multiply(&a).unwrap().is_identity());
            prop_assert!(!a.multiply(&a).unwrap().is_negative());
            let left = ab.multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(left.unsigned(), right.unsigned());
            // commuting factors give an exact hermitian product
            if !a.symplectic_inner(&b).unwrap() {
                prop_assert_eq!(a.product_phase(&b).unwrap() % 2, 0);
            }
        }

        #[test]
        fn render_parse_round_trip((a, _, _) in arb_pair(90), neg in any::<bool>()) {
            let a = a.with_sign(neg);
            let text = a.to_string();
            prop_assert_eq!(text.parse::<PauliString>().unwrap(), a);
        }
    }
}
