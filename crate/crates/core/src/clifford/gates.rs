//! Gate kinds and their signed Pauli action tables.
//!
//! Each table maps a packed Pauli label `a` on the gate's support to the label
//! `b` and sign `s` with `U P_a U† = s P_b`. Tables are derived once from the
//! gate unitaries and checked to be signed permutations fixing the identity.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::pauli::PauliIndex;

/// Single-qubit Clifford gates. Modulo Paulis these cover all six cosets:
/// `I`, `H`, `S ~ S_DAG`, `SX ~ SX_DAG`, `C_XYZ` and `C_ZYX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SingleKind {
    I,
    H,
    S,
    Sdg,
    Sx,
    Sxdg,
    Cxyz,
    Czyx,
}

impl SingleKind {
    pub const ALL: [SingleKind; 8] = [
        SingleKind::I,
        SingleKind::H,
        SingleKind::S,
        SingleKind::Sdg,
        SingleKind::Sx,
        SingleKind::Sxdg,
        SingleKind::Cxyz,
        SingleKind::Czyx,
    ];

    /// One representative per coset of the Pauli group.
    pub const COSETS: [SingleKind; 6] = [
        SingleKind::I,
        SingleKind::H,
        SingleKind::S,
        SingleKind::Sx,
        SingleKind::Cxyz,
        SingleKind::Czyx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SingleKind::I => "I",
            SingleKind::H => "H",
            SingleKind::S => "S",
            SingleKind::Sdg => "S_DAG",
            SingleKind::Sx => "SX",
            SingleKind::Sxdg => "SX_DAG",
            SingleKind::Cxyz => "C_XYZ",
            SingleKind::Czyx => "C_ZYX",
        }
    }

    pub fn from_name(name: &str) -> Option<SingleKind> {
        SingleKind::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn inverse(self) -> SingleKind {
        match self {
            SingleKind::S => SingleKind::Sdg,
            SingleKind::Sdg => SingleKind::S,
            SingleKind::Sx => SingleKind::Sxdg,
            SingleKind::Sxdg => SingleKind::Sx,
            SingleKind::Cxyz => SingleKind::Czyx,
            SingleKind::Czyx => SingleKind::Cxyz,
            other => other,
        }
    }

    /// Coset representative. `S_DAG = S·Z` and `SX_DAG = SX·X`, so under Pauli
    /// frame randomization they run as the same physical gate.
    pub fn noise_class(self) -> SingleKind {
        match self {
            SingleKind::Sdg => SingleKind::S,
            SingleKind::Sxdg => SingleKind::Sx,
            other => other,
        }
    }

    fn ordinal(self) -> usize {
        self as usize
    }

    fn unitary(self) -> [[Complex64; 2]; 2] {
        let c = Complex64::new;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            SingleKind::I => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]],
            SingleKind::H => [[c(r, 0.), c(r, 0.)], [c(r, 0.), c(-r, 0.)]],
            SingleKind::S => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(0., 1.)]],
            SingleKind::Sdg => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(0., -1.)]],
            SingleKind::Sx => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            SingleKind::Sxdg => [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]],
            SingleKind::Cxyz => [[c(0.5, -0.5), c(-0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            SingleKind::Czyx => [[c(0.5, 0.5), c(0.5, 0.5)], [c(-0.5, 0.5), c(0.5, -0.5)]],
        }
    }
}

/// Gate kinds usable in circuits, plus the measurement pseudo-gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Single(SingleKind),
    /// Controlled-X, control on the first qubit.
    Cx,
    Cz,
    /// Two single-qubit gates applied together and treated as one composite
    /// gate carrying a correlated two-qubit channel.
    Pair(SingleKind, SingleKind),
    Meas,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Single(_) | GateKind::Meas => 1,
            GateKind::Cx | GateKind::Cz | GateKind::Pair(..) => 2,
        }
    }

    pub fn is_measurement(self) -> bool {
        self == GateKind::Meas
    }

    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::Single(k) => GateKind::Single(k.inverse()),
            GateKind::Pair(a, b) => GateKind::Pair(a.inverse(), b.inverse()),
            other => other,
        }
    }

    /// Kind under which the gate's noise is keyed.
    pub fn noise_class(self) -> GateKind {
        match self {
            GateKind::Single(k) => GateKind::Single(k.noise_class()),
            GateKind::Pair(a, b) => GateKind::Pair(a.noise_class(), b.noise_class()),
            other => other,
        }
    }

    fn ordinal(self) -> Option<usize> {
        match self {
            GateKind::Single(k) => Some(k.ordinal()),
            GateKind::Cx => Some(8),
            GateKind::Cz => Some(9),
            GateKind::Pair(a, b) => Some(10 + 8 * a.ordinal() + b.ordinal()),
            GateKind::Meas => None,
        }
    }

    fn all_unitary() -> impl Iterator<Item = GateKind> {
        SingleKind::ALL
            .into_iter()
            .map(GateKind::Single)
            .chain([GateKind::Cx, GateKind::Cz])
            .chain(
                SingleKind::ALL
                    .into_iter()
                    .flat_map(|a| SingleKind::ALL.into_iter().map(move |b| GateKind::Pair(a, b))),
            )
    }

    /// Signed image of `label` under conjugation by this gate.
    ///
    /// # Panics
    /// On `Meas`, which has no unitary action.
    #[inline]
    pub fn conjugate_label(self, label: PauliIndex) -> (PauliIndex, bool) {
        let ordinal = self.ordinal().expect("measurement has no action table");
        let (image, negative) = tables()[ordinal][label.value()];
        (PauliIndex(image), negative)
    }

    /// Unitary on the gate's support; slot 0 is the least significant bit of
    /// the computational basis index.
    pub fn unitary(self) -> Option<Vec<Vec<Complex64>>> {
        let to_vec = |m: [[Complex64; 2]; 2]| m.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
        let one = Complex64::new(1., 0.);
        let zero = Complex64::new(0., 0.);
        match self {
            GateKind::Single(k) => Some(to_vec(k.unitary())),
            GateKind::Cx => {
                let mut u = vec![vec![zero; 4]; 4];
                for (col, row) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
                    u[row][col] = one;
                }
                Some(u)
            }
            GateKind::Cz => {
                let mut u = vec![vec![zero; 4]; 4];
                for i in 0..4 {
                    u[i][i] = if i == 3 { -one } else { one };
                }
                Some(u)
            }
            GateKind::Pair(a, b) => Some(kron(&to_vec(b.unitary()), &to_vec(a.unitary()))),
            GateKind::Meas => None,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Single(k) => f.write_str(k.name()),
            GateKind::Cx => f.write_str("CX"),
            GateKind::Cz => f.write_str("CZ"),
            GateKind::Pair(a, b) => write!(f, "{}*{}", a.name(), b.name()),
            GateKind::Meas => f.write_str("MEAS"),
        }
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "CX" | "CNOT" => Ok(GateKind::Cx),
            "CZ" => Ok(GateKind::Cz),
            "MEAS" => Ok(GateKind::Meas),
            _ => {
                if let Some((a, b)) = s.split_once('*') {
                    match (SingleKind::from_name(a), SingleKind::from_name(b)) {
                        (Some(a), Some(b)) => Ok(GateKind::Pair(a, b)),
                        _ => Err(format!("unknown gate {s:?}")),
                    }
                } else {
                    SingleKind::from_name(s)
                        .map(GateKind::Single)
                        .ok_or_else(|| format!("unknown gate {s:?}"))
                }
            }
        }
    }
}

type Matrix = Vec<Vec<Complex64>>;

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0., 0.); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![Complex64::new(0., 0.); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == Complex64::new(0., 0.) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn adjoint(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

fn pauli_matrix(label: PauliIndex, k: usize) -> Matrix {
    let c = Complex64::new;
    let single = |code: u8| -> Matrix {
        match code {
            0 => vec![vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(1., 0.)]],
            1 => vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]],
            2 => vec![vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(-1., 0.)]],
            _ => vec![vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]],
        }
    };
    // slot k-1 is the most significant tensor factor
    (0..k)
        .rev()
        .map(|slot| single(label.slot(slot).code()))
        .reduce(|acc, m| kron(&acc, &m))
        .unwrap()
}

fn build_table(kind: GateKind) -> Vec<(u16, bool)> {
    let k = kind.arity();
    let dim = 1usize << k;
    let u = kind.unitary().expect("unitary gate");
    let u_dag = adjoint(&u);
    let labels = PauliIndex::count(k);
    let paulis: Vec<Matrix> = (0..labels).map(|a| pauli_matrix(PauliIndex(a as u16), k)).collect();
    let mut table = Vec::with_capacity(labels);
    let mut seen = vec![false; labels];
    for a in 0..labels {
        let image = matmul(&matmul(&u, &paulis[a]), &u_dag);
        let mut found = None;
        for (b, pb) in paulis.iter().enumerate() {
            // Tr(P_b M) / dim
            let mut tr = Complex64::new(0., 0.);
            for i in 0..dim {
                for j in 0..dim {
                    tr += pb[i][j] * image[j][i];
                }
            }
            tr /= dim as f64;
            if (tr.re.abs() - 1.0).abs() < 1e-9 && tr.im.abs() < 1e-9 {
                found = Some((b as u16, tr.re < 0.0));
                break;
            }
        }
        let (b, negative) = found.unwrap_or_else(|| panic!("{kind} does not map Paulis to Paulis"));
        assert!(!seen[b as usize], "{kind} action is not a permutation");
        seen[b as usize] = true;
        table.push((b, negative));
    }
    assert_eq!(table[0], (0, false), "{kind} must fix the identity");
    table
}

fn tables() -> &'static [Vec<(u16, bool)>] {
    static TABLES: OnceLock<Vec<Vec<(u16, bool)>>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut out = vec![Vec::new(); 74];
        for kind in GateKind::all_unitary() {
            out[kind.ordinal().unwrap()] = build_table(kind);
        }
        out
    })
}
