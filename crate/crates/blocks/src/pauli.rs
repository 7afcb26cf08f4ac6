//! Bit-packed Pauli words over GF(2) and span membership by elimination.
//!
//! A word on n qubits is stored as two n-bit vectors (X part, Z part); Y has
//! both bits set. Phases are irrelevant for the stabilizer bookkeeping done
//! here, so multiplication is plain XOR and commutation is the symplectic
//! parity.

/// Sparse Pauli letter.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Letter {
    X,
    Y,
    Z,
}

impl Letter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Option<Letter> {
        match (x, z) {
            (true, false) => Some(Letter::X),
            (true, true) => Some(Letter::Y),
            (false, true) => Some(Letter::Z),
            (false, false) => None,
        }
    }
}

/// Dense Pauli word on a fixed number of qubits.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PauliWord {
    pub n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        PauliWord { n, x: vec![0; words(n)], z: vec![0; words(n)] }
    }

    pub fn xor_letter(&mut self, qubit: usize, letter: Letter) {
        debug_assert!(qubit < self.n);
        let (bx, bz) = letter.bits();
        if bx {
            self.x[qubit / 64] ^= 1 << (qubit % 64);
        }
        if bz {
            self.z[qubit / 64] ^= 1 << (qubit % 64);
        }
    }

    pub fn letter(&self, qubit: usize) -> Option<Letter> {
        let bx = self.x[qubit / 64] >> (qubit % 64) & 1 == 1;
        let bz = self.z[qubit / 64] >> (qubit % 64) & 1 == 1;
        Letter::from_bits(bx, bz)
    }

    pub fn mul_assign(&mut self, other: &PauliWord) {
        debug_assert_eq!(self.n, other.n);
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Symplectic product: true if the two words anticommute.
    pub fn anticommutes(&self, other: &PauliWord) -> bool {
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= (self.x[i] & other.z[i]).count_ones() & 1;
            parity ^= (self.z[i] & other.x[i]).count_ones() & 1;
        }
        parity == 1
    }

    pub fn support(&self) -> Vec<(usize, Letter)> {
        let mut out = Vec::new();
        for q in 0..self.n {
            if let Some(l) = self.letter(q) {
                out.push((q, l));
            }
        }
        out
    }

    /// Index of the first set bit in the concatenated (X | Z) bit layout,
    /// used as the elimination pivot.
    fn pivot(&self) -> Option<usize> {
        for (i, &w) in self.x.iter().enumerate() {
            if w != 0 {
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        for (i, &w) in self.z.iter().enumerate() {
            if w != 0 {
                return Some(self.n + i * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }
}

/// A GF(2) span of Pauli words in row-echelon form.
pub struct Span {
    n: usize,
    /// rows[k] = (pivot, word); sorted by pivot, each pivot unique.
    rows: Vec<(usize, PauliWord)>,
}

impl Span {
    pub fn new(n: usize) -> Self {
        Span { n, rows: Vec::new() }
    }

    pub fn from_generators<'a>(n: usize, gens: impl IntoIterator<Item = &'a PauliWord>) -> Self {
        let mut s = Span::new(n);
        for g in gens {
            s.insert(g.clone());
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `w` against the current rows; the remainder has no pivot in
    /// common with any row.
    pub fn reduce(&self, mut w: PauliWord) -> PauliWord {
        debug_assert_eq!(w.n, self.n);
        loop {
            let Some(p) = w.pivot() else { return w };
            match self.rows.binary_search_by_key(&p, |r| r.0) {
                Ok(i) => {
                    let row = self.rows[i].1.clone();
                    w.mul_assign(&row);
                }
                Err(_) => return w,
            }
        }
    }

    /// Insert a word; returns false if it was already in the span.
    pub fn insert(&mut self, w: PauliWord) -> bool {
        let r = self.reduce(w);
        match r.pivot() {
            None => false,
            Some(p) => {
                let i = self.rows.binary_search_by_key(&p, |row| row.0).unwrap_err();
                self.rows.insert(i, (p, r));
                true
            }
        }
    }

    pub fn contains(&self, w: &PauliWord) -> bool {
        self.reduce(w.clone()).is_identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(n: usize, letters: &[(usize, Letter)]) -> PauliWord {
        let mut w = PauliWord::identity(n);
        for &(q, l) in letters {
            w.xor_letter(q, l);
        }
        w
    }

    #[test]
    fn commutation() {
        let xx = word(2, &[(0, Letter::X), (1, Letter::X)]);
        let zz = word(2, &[(0, Letter::Z), (1, Letter::Z)]);
        let zi = word(2, &[(0, Letter::Z)]);
        assert!(!xx.anticommutes(&zz));
        assert!(xx.anticommutes(&zi));
    }

    #[test]
    fn span_membership() {
        let n = 3;
        let g1 = word(n, &[(0, Letter::X), (1, Letter::X)]);
        let g2 = word(n, &[(1, Letter::X), (2, Letter::X)]);
        let s = Span::from_generators(n, [&g1, &g2]);
        assert_eq!(s.rank(), 2);
        assert!(s.contains(&word(n, &[(0, Letter::X), (2, Letter::X)])));
        assert!(!s.contains(&word(n, &[(0, Letter::X)])));
        // Y = X*Z mixes both planes.
        let y01 = word(n, &[(0, Letter::Y), (1, Letter::Y)]);
        assert!(!s.contains(&y01));
        let s2 = Span::from_generators(n, [&g1, &g2, &word(n, &[(0, Letter::Z), (1, Letter::Z)])]);
        assert!(s2.contains(&y01));
    }
}
