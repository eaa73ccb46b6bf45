//! Finite colourings of `[N] = {1, ..., N}`.
//!
//! Colours are `1..=r`; empty classes are allowed. The on-disk format is a
//! header line `N r` followed by `N` lines holding one colour each.

use crate::arith::iterated_isqrt;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colouring {
    r: u32,
    /// `colours[x - 1]` is the colour of `x`.
    colours: Vec<u32>,
}

impl Colouring {
    pub fn new(r: u32, colours: Vec<u32>) -> Result<Self> {
        if r == 0 {
            return Err(Error::precondition("a colouring needs at least one colour"));
        }
        if colours.is_empty() {
            return Err(Error::precondition("a colouring needs N >= 1"));
        }
        if let Some(pos) = colours.iter().position(|&c| c == 0 || c > r) {
            return Err(Error::precondition(format!(
                "colour {} of x = {} is outside 1..={r}",
                colours[pos],
                pos + 1
            )));
        }
        Ok(Colouring { r, colours })
    }

    pub fn n(&self) -> u64 {
        self.colours.len() as u64
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Colour of `x`, or `None` outside `[N]`.
    pub fn get(&self, x: u64) -> Option<u32> {
        x.checked_sub(1)
            .and_then(|i| self.colours.get(usize::try_from(i).ok()?))
            .copied()
    }

    /// Colour of `x`; panics outside `[N]`.
    pub fn colour(&self, x: u64) -> u32 {
        self.get(x)
            .unwrap_or_else(|| panic!("{x} is outside [1, {}]", self.n()))
    }

    pub fn assignment(&self) -> &[u32] {
        &self.colours
    }

    /// Members of colour class `j` in increasing order.
    pub fn class(&self, j: u32) -> Vec<u64> {
        self.colours
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == j)
            .map(|(i, _)| i as u64 + 1)
            .collect()
    }

    /// All classes, indexed by colour - 1.
    pub fn classes(&self) -> Vec<Vec<u64>> {
        let mut classes = vec![Vec::new(); self.r as usize];
        for (i, &c) in self.colours.iter().enumerate() {
            classes[c as usize - 1].push(i as u64 + 1);
        }
        classes
    }

    pub fn class_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0; self.r as usize];
        for &c in &self.colours {
            sizes[c as usize - 1] += 1;
        }
        sizes
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.colours.len() * 3 + 16);
        writeln!(out, "{} {}", self.n(), self.r).unwrap();
        for c in &self.colours {
            writeln!(out, "{c}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header `N r`".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [n, r] = fields[..] else {
            return Err(parse_err(1, format!("expected `N r`, found {header:?}")));
        };
        let n: usize = n.parse().map_err(|_| parse_err(1, format!("invalid N {n:?}")))?;
        let r: u32 = r.parse().map_err(|_| parse_err(1, format!("invalid r {r:?}")))?;
        if n == 0 || r == 0 {
            return Err(parse_err(1, "N and r must be positive".into()));
        }

        let mut colours = Vec::with_capacity(n);
        for (idx, line) in lines {
            let line_no = idx + 1;
            let field = line.trim();
            if field.is_empty() {
                continue;
            }
            if colours.len() == n {
                return Err(parse_err(line_no, format!("more than N = {n} colour lines")));
            }
            let c: u32 = field
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid colour {field:?}")))?;
            if c == 0 || c > r {
                return Err(parse_err(line_no, format!("colour {c} outside 1..={r}")));
            }
            colours.push(c);
        }
        if colours.len() != n {
            return Err(parse_err(
                text.lines().count() + 1,
                format!("expected {n} colour lines, found {}", colours.len()),
            ));
        }
        Ok(Colouring { r, colours })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Upper end of each extremal class: `bounds[j] = floor(n^(1/2^j))` for `j = 0..r`.
pub fn extremal_thresholds(n: u64, r: u32) -> Vec<u64> {
    (0..r).map(|j| iterated_isqrt(n, j)).collect()
}

/// The nested power-interval colouring: colour `j < r` is
/// `(n^(1/2^j), n^(1/2^(j-1))]`, colour `r` is `[1, n^(1/2^(r-1))]`, every
/// endpoint taken as the floor of the real power.
pub fn extremal_colouring(n: u64, r: u32) -> Result<Colouring> {
    if n < 2 || r == 0 {
        return Err(Error::precondition("extremal colouring needs n >= 2 and r >= 1"));
    }
    let bounds = extremal_thresholds(n, r);
    let mut colours = vec![r; n as usize];
    for j in 1..r as usize {
        let (lo, hi) = (bounds[j], bounds[j - 1]);
        for slot in &mut colours[lo as usize..hi as usize] {
            *slot = j as u32;
        }
    }
    Colouring::new(r, colours)
}

/// Colour of `x` is `1 + (x mod m)`.
pub fn congruence_colouring(n: u64, modulus: u32) -> Result<Colouring> {
    if modulus == 0 {
        return Err(Error::precondition("modulus must be positive"));
    }
    let colours = (1..=n).map(|x| 1 + (x % modulus as u64) as u32).collect();
    Colouring::new(modulus, colours)
}

/// I.i.d. uniform colours from a ChaCha8 stream seeded with `seed`.
pub fn random_colouring(n: u64, r: u32, seed: u64) -> Result<Colouring> {
    if r == 0 {
        return Err(Error::precondition("r must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let colours = (0..n).map(|_| rng.random_range(1..=r)).collect();
    Colouring::new(r, colours)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftMode {
    /// Odd numbers get a fresh colour, even `m` gets the colour of `m / 2`.
    Halving,
    /// `m` gets the colour of `b m / a` when `a | m`, else `r + (m mod a)`.
    Modular { a: u64, b: u64 },
}

impl LiftMode {
    /// Largest domain whose referenced indices stay inside `[n]`.
    pub fn default_target(&self, n: u64) -> u64 {
        match *self {
            LiftMode::Halving => 2 * n,
            LiftMode::Modular { a, b } => (a as u128 * n as u128 / b as u128) as u64,
        }
    }
}

/// Lift `c` to a colouring of `[target_n]` (default: [`LiftMode::default_target`]).
pub fn lift_colouring(c: &Colouring, mode: LiftMode, target_n: Option<u64>) -> Result<Colouring> {
    let target = target_n.unwrap_or_else(|| mode.default_target(c.n()));
    if target == 0 {
        return Err(Error::precondition("lifted domain is empty"));
    }
    let r = c.r();
    let (new_r, lookup): (u32, Box<dyn Fn(u64) -> Result<u32>>) = match mode {
        LiftMode::Halving => (
            r + 1,
            Box::new(move |m| {
                if m % 2 == 1 {
                    return Ok(r + 1);
                }
                let index = m / 2;
                c.get(index).ok_or(Error::Domain { m, index, n: c.n() })
            }),
        ),
        LiftMode::Modular { a, b } => {
            if a == 0 || b == 0 {
                return Err(Error::precondition("modular lift needs a >= 1 and b >= 1"));
            }
            let extra = u32::try_from(a).map_err(|_| Error::precondition("modulus a too large"))?;
            (
                r + extra,
                Box::new(move |m| {
                    if m % a != 0 {
                        return Ok(r + (m % a) as u32);
                    }
                    let index = (b as u128 * (m / a) as u128).min(u64::MAX as u128) as u64;
                    c.get(index).ok_or(Error::Domain { m, index, n: c.n() })
                }),
            )
        }
    };
    let colours = (1..=target).map(lookup).collect::<Result<Vec<_>>>()?;
    Colouring::new(new_r, colours)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremal_examples() {
        let c = extremal_colouring(16, 2).unwrap();
        assert_eq!(c.class(1), (5..=16).collect::<Vec<_>>());
        assert_eq!(c.class(2), (1..=4).collect::<Vec<_>>());

        let one = extremal_colouring(16, 1).unwrap();
        assert_eq!(one.class_sizes(), vec![16]);

        let three = extremal_colouring(100, 3).unwrap();
        assert_eq!(three.class(3), vec![1, 2, 3]);
        assert_eq!(three.class(2), (4..=10).collect::<Vec<_>>());
        assert_eq!(three.class(1), (11..=100).collect::<Vec<_>>());
    }

    /// Independent oracle for the class of `x`: compare `x^(2^j)` against `n`
    /// in exact integers. `x > floor(n^(1/2^j))` iff `x^(2^j) > n`.
    fn oracle_colour(n: u64, r: u32, x: u64) -> u32 {
        for j in 1..r {
            let exceeds = (0..j)
                .try_fold(x as u128, |acc, _| acc.checked_mul(acc))
                .map_or(true, |p| p > n as u128);
            if exceeds {
                return j;
            }
        }
        r
    }

    #[test]
    fn extremal_is_exhaustive_partition() {
        for n in (2..=10_000u64)
            .step_by(37)
            .chain([2, 3, 4, 15, 16, 17, 255, 256, 257, 10_000])
        {
            for r in 1..=6 {
                let c = extremal_colouring(n, r).unwrap();
                assert_eq!(c.n(), n);
                assert_eq!(c.class_sizes().iter().sum::<u64>(), n);
                for x in 1..=n {
                    assert_eq!(c.colour(x), oracle_colour(n, r, x), "n={n} r={r} x={x}");
                }
                // class j+1 ends where class j starts
                let bounds = extremal_thresholds(n, r);
                for j in 1..r as usize {
                    let class = c.class(j as u32);
                    if let Some(&lo) = class.first() {
                        assert_eq!(lo, bounds[j] + 1);
                    }
                    let next = c.class(j as u32 + 1);
                    if let Some(&hi) = next.last() {
                        assert_eq!(hi, bounds[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn congruence_parity() {
        let c = congruence_colouring(6, 2).unwrap();
        assert_eq!(c.assignment(), &[2, 1, 2, 1, 2, 1]);
    }

    #[test]
    fn random_round_trip_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let c = random_colouring(10, 3, 7).unwrap();
        c.save(&path).unwrap();
        assert_eq!(Colouring::load(&path).unwrap(), c);
        assert_eq!(random_colouring(10, 3, 7).unwrap(), c);
        assert_ne!(
            random_colouring(1000, 3, 8).unwrap(),
            random_colouring(1000, 3, 7).unwrap()
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match Colouring::parse("3 2\n1\n0\n2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match Colouring::parse("3 2\n1\n3\n2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(Colouring::parse("3\n1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Colouring::parse("3 2\n1\n2\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            Colouring::parse("2 2\n1\nx\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            Colouring::parse("1 2\n1\n2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn halving_lift() {
        let base = Colouring::new(1, vec![1; 4]).unwrap();
        let lifted = lift_colouring(&base, LiftMode::Halving, Some(8)).unwrap();
        assert_eq!(lifted.r(), 2);
        for m in 1..=8 {
            assert_eq!(lifted.colour(m), if m % 2 == 1 { 2 } else { 1 });
        }
        let err = lift_colouring(&base, LiftMode::Halving, Some(10)).unwrap_err();
        assert!(matches!(err, Error::Domain { m: 10, index: 5, .. }));
    }

    #[test]
    fn modular_lift() {
        let parity = congruence_colouring(10, 2).unwrap();
        let lifted = lift_colouring(&parity, LiftMode::Modular { a: 2, b: 1 }, None).unwrap();
        assert_eq!(lifted.n(), 20);
        assert_eq!(lifted.r(), 4);
        assert_eq!(lifted.colour(4), parity.colour(2));

        let by3 = lift_colouring(&parity, LiftMode::Modular { a: 3, b: 1 }, Some(9)).unwrap();
        assert_eq!(by3.colour(5), parity.r() + 2);
        assert_eq!(by3.colour(6), parity.colour(2));

        let err = lift_colouring(&parity, LiftMode::Modular { a: 1, b: 2 }, Some(6)).unwrap_err();
        assert!(matches!(err, Error::Domain { m: 6, index: 12, .. }));
    }
}
