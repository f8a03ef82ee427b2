//! Truth tables over small signatures: a bit per letter.

/// Largest signature whose guards are evaluated through truth tables.
pub const MAX_TABLE_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    atoms: usize,
    words: Vec<u64>,
}

const ATOM_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl Table {
    fn word_count(atoms: usize) -> usize {
        if atoms <= 6 {
            1
        } else {
            1 << (atoms - 6)
        }
    }

    fn last_mask(atoms: usize) -> u64 {
        if atoms >= 6 {
            u64::MAX
        } else {
            (1u64 << (1 << atoms)) - 1
        }
    }

    pub fn empty(atoms: usize) -> Self {
        assert!(atoms <= MAX_TABLE_ATOMS);
        Table { atoms, words: vec![0; Self::word_count(atoms)] }
    }

    pub fn full(atoms: usize) -> Self {
        let mut t = Table::empty(atoms);
        for w in &mut t.words {
            *w = u64::MAX;
        }
        t.trim();
        t
    }

    pub fn atom(atoms: usize, i: usize) -> Self {
        let mut t = Table::empty(atoms);
        if i < 6 {
            for w in &mut t.words {
                *w = ATOM_PATTERNS[i];
            }
        } else {
            for (k, w) in t.words.iter_mut().enumerate() {
                if k >> (i - 6) & 1 == 1 {
                    *w = u64::MAX;
                }
            }
        }
        t.trim();
        t
    }

    pub fn from_fn(atoms: usize, f: impl Fn(u64) -> bool) -> Self {
        let mut t = Table::empty(atoms);
        for letter in 0..1u64 << atoms {
            if f(letter) {
                t.insert(letter);
            }
        }
        t
    }

    fn trim(&mut self) {
        let m = Self::last_mask(self.atoms);
        if let Some(w) = self.words.last_mut() {
            *w &= m;
        }
    }

    pub fn contains(&self, letter: u64) -> bool {
        self.words[(letter >> 6) as usize] >> (letter & 63) & 1 == 1
    }

    pub fn insert(&mut self, letter: u64) {
        self.words[(letter >> 6) as usize] |= 1 << (letter & 63);
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn negate(&self) -> Self {
        let mut t = Table { atoms: self.atoms, words: self.words.iter().map(|w| !w).collect() };
        t.trim();
        t
    }

    pub fn and(&self, other: &Table) -> Self {
        let mut t = self.clone();
        t.and_assign(other);
        t
    }

    pub fn and_assign(&mut self, other: &Table) {
        debug_assert_eq!(self.atoms, other.atoms);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn or_assign(&mut self, other: &Table) {
        debug_assert_eq!(self.atoms, other.atoms);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    #[cfg(test)]
    pub fn is_subset(&self, other: &Table) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn first(&self) -> Option<u64> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| (k as u64) << 6 | u64::from(w.trailing_zeros()))
    }

    pub fn letters(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            (0..64u64).filter(move |b| w >> b & 1 == 1).map(move |b| (k as u64) << 6 | b)
        })
    }

    /// Maps the table through a letter transformation into `atoms` atoms:
    /// the result contains `f(α)` for every `α` in `self`.
    pub fn image(&self, atoms: usize, f: impl Fn(u64) -> u64) -> Self {
        let mut t = Table::empty(atoms);
        for l in self.letters() {
            t.insert(f(l));
        }
        t
    }

    /// The table over `atoms` atoms containing `α` iff `f(α)` is in `self`.
    pub fn preimage(&self, atoms: usize, f: impl Fn(u64) -> u64) -> Self {
        Table::from_fn(atoms, |l| self.contains(f(l)))
    }
}
