//! Players built from sequential games and normal-form payoff tables.

use std::fmt;
use std::sync::Arc;

use num::rational::BigRational;
use num::{One, Signed, Zero};

use super::Player;
use crate::bits::BitString;
use crate::encoding::encode_pair;
use crate::error::{Error, Result};

/// Fixed-width encoding of `m`-round interleaved games `a1 b1 a2 b2 …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameCodec {
    moves: Vec<String>,
    width: usize,
    rounds: usize,
}

impl GameCodec {
    pub fn new(moves: Vec<String>, width: usize, rounds: usize) -> Result<Self> {
        if moves.is_empty() {
            return Err(Error::InvalidStrategy("empty move alphabet".into()));
        }
        if width < 64 && moves.len() as u64 > 1u64 << width {
            return Err(Error::InvalidStrategy(format!(
                "{} moves do not fit in {width} bits",
                moves.len()
            )));
        }
        Ok(GameCodec {
            moves,
            width,
            rounds,
        })
    }

    pub fn moves(&self) -> &[String] {
        &self.moves
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn plies(&self) -> usize {
        2 * self.rounds
    }

    /// Game string length `n = 2·m·w`.
    pub fn n(&self) -> usize {
        self.plies() * self.width
    }

    pub fn move_index(&self, name: &str) -> Option<usize> {
        self.moves.iter().position(|m| m == name)
    }

    pub fn encode(&self, game: &[usize]) -> Result<BitString> {
        if game.len() != self.plies() {
            return Err(Error::InvalidStrategy(format!(
                "game has {} plies, codec expects {}",
                game.len(),
                self.plies()
            )));
        }
        let mut out = BitString::empty();
        for &mv in game {
            if mv >= self.moves.len() {
                return Err(Error::InvalidStrategy(format!("move {mv} outside alphabet")));
            }
            out.extend_from(&BitString::from_uint(mv as u64, self.width));
        }
        Ok(out)
    }

    pub fn encode_named(&self, game: &[&str]) -> Result<BitString> {
        let idx = game
            .iter()
            .map(|name| {
                self.move_index(name)
                    .ok_or_else(|| Error::InvalidStrategy(format!("unknown move {name:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.encode(&idx)
    }

    /// Inverse of [`encode`](Self::encode); `None` for strings that are not
    /// well-formed games.
    pub fn decode(&self, x: &BitString) -> Option<Vec<usize>> {
        if x.len() != self.n() {
            return None;
        }
        (0..self.plies())
            .map(|k| {
                let mv = x.slice(k * self.width, (k + 1) * self.width).to_uint()? as usize;
                (mv < self.moves.len()).then_some(mv)
            })
            .collect()
    }

    /// Renders a game as `(a1,b1)(a2,b2)…`.
    pub fn render(&self, game: &[usize]) -> String {
        game.chunks(2)
            .map(|r| {
                let names: Vec<&str> = r.iter().map(|&m| self.moves[m].as_str()).collect();
                format!("({})", names.join(","))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Moves on plies 0, 2, 4, …
    First,
    /// Moves on plies 1, 3, 5, …
    Second,
}

impl Side {
    fn owns(self, ply: usize) -> bool {
        match self {
            Side::First => ply.is_multiple_of(2),
            Side::Second => ply % 2 == 1,
        }
    }
}

type ChoiceFn = dyn Fn(&[usize]) -> Vec<usize> + Send + Sync;

/// A nondeterministic strategy: the set of moves allowed after each partial
/// game history.
#[derive(Clone)]
pub struct NondetStrategy {
    pub side: Side,
    choices: Arc<ChoiceFn>,
}

impl NondetStrategy {
    pub fn new(side: Side, choices: impl Fn(&[usize]) -> Vec<usize> + Send + Sync + 'static) -> Self {
        NondetStrategy {
            side,
            choices: Arc::new(choices),
        }
    }

    /// Allows every move at every ply.
    pub fn unrestricted(side: Side, alphabet: usize) -> Self {
        Self::new(side, move |_| (0..alphabet).collect())
    }

    pub fn allowed(&self, history: &[usize]) -> Vec<usize> {
        (self.choices)(history)
    }

    /// All games in which this strategy's moves are allowed at every owned
    /// ply, with the opponent free.
    pub fn to_player(&self, codec: &GameCodec) -> Result<Player> {
        let mut members = Vec::new();
        let mut history = Vec::with_capacity(codec.plies());
        self.expand(codec, &mut history, &mut members)?;
        Player::new(codec.n(), members)
    }

    fn expand(
        &self,
        codec: &GameCodec,
        history: &mut Vec<usize>,
        out: &mut Vec<BitString>,
    ) -> Result<()> {
        let ply = history.len();
        if ply == codec.plies() {
            out.push(codec.encode(history)?);
            return Ok(());
        }
        let options: Vec<usize> = if self.side.owns(ply) {
            let mut allowed = self.allowed(history);
            if allowed.is_empty() {
                return Err(Error::InvalidStrategy(format!(
                    "no moves allowed after history {history:?}"
                )));
            }
            if let Some(bad) = allowed.iter().find(|&&m| m >= codec.moves().len()) {
                return Err(Error::InvalidStrategy(format!("move {bad} outside alphabet")));
            }
            allowed.sort_unstable();
            allowed.dedup();
            allowed
        } else {
            (0..codec.moves().len()).collect()
        };
        for mv in options {
            history.push(mv);
            self.expand(codec, history, out)?;
            history.pop();
        }
        Ok(())
    }
}

impl fmt::Debug for NondetStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NondetStrategy").field("side", &self.side).finish()
    }
}

/// Two rounds of rock-paper-scissors: `R=00, P=01, S=10`, plies `a1 b1 a2 b2`.
pub fn rps_codec() -> GameCodec {
    GameCodec::new(vec!["R".into(), "P".into(), "S".into()], 2, 2).expect("rps codec")
}

/// The rock-paper-scissors pair: α always plays rock, β plays paper first
/// and then copies α's first move. Returns `(codec, A, B)`.
pub fn rps_fixture() -> (GameCodec, Player, Player) {
    let codec = rps_codec();
    let rock = NondetStrategy::new(Side::First, |_| vec![0]);
    let paper_then_copy = NondetStrategy::new(Side::Second, |h: &[usize]| {
        if h.len() < 2 {
            vec![1]
        } else {
            vec![h[0]]
        }
    });
    let a = rock.to_player(&codec).expect("rock player");
    let b = paper_then_copy.to_player(&codec).expect("copy player");
    (codec, a, b)
}

/// A normalised payoff table over pairs of `n`-bit actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormGame {
    n: usize,
    /// `payoff[x][y]`
    payoff: Vec<Vec<BigRational>>,
}

impl NormalFormGame {
    pub fn new(n: usize, payoff: Vec<Vec<BigRational>>) -> Result<Self> {
        if n > 16 {
            return Err(Error::ScaleLimit(format!("action width {n} too large")));
        }
        let size = 1usize << n;
        if payoff.len() != size || payoff.iter().any(|row| row.len() != size) {
            return Err(Error::Parse(format!("payoff table must be {size}x{size}")));
        }
        if payoff
            .iter()
            .flatten()
            .any(|v| v.is_negative() || v > &BigRational::one())
        {
            return Err(Error::Parse("payoffs must lie in [0, 1]".into()));
        }
        Ok(NormalFormGame { n, payoff })
    }

    pub fn from_fn(n: usize, f: impl Fn(u64, u64) -> BigRational) -> Result<Self> {
        let size = 1u64 << n;
        let payoff = (0..size)
            .map(|x| (0..size).map(|y| f(x, y)).collect())
            .collect();
        Self::new(n, payoff)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn payoff(&self, x: u64, y: u64) -> &BigRational {
        &self.payoff[x as usize][y as usize]
    }

    fn is_one(&self, x: u64, y: u64) -> bool {
        self.payoff(x, y).is_one()
    }
}

/// `A = {⟨x,y⟩ : p(x,y) = 1}` and `B = {⟨x,y⟩ : q(y,x) = 1}`; their
/// intersection is the pure-equilibrium set `{⟨x,y⟩ : p(x,y) = q(y,x) = 1}`.
/// Payoffs are compared to 1 exactly.
pub fn nash_players(p: &NormalFormGame, q: &NormalFormGame) -> Result<(Player, Player)> {
    if p.n != q.n {
        return Err(Error::LengthMismatch {
            expected: p.n,
            got: q.n,
        });
    }
    let n = p.n;
    let size = 1u64 << n;
    let pair = |x: u64, y: u64| encode_pair(&BitString::from_uint(x, n), &BitString::from_uint(y, n));
    let width = pair(0, 0).len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for x in 0..size {
        for y in 0..size {
            if p.is_one(x, y) {
                a.push(pair(x, y));
            }
            if q.is_one(y, x) {
                b.push(pair(x, y));
            }
        }
    }
    Ok((Player::new(width, a)?, Player::new(width, b)?))
}

impl NormalFormGame {
    pub fn constant(n: usize, v: BigRational) -> Result<Self> {
        Self::from_fn(n, |_, _| v.clone())
    }

    pub fn indicator(n: usize, f: impl Fn(u64, u64) -> bool) -> Result<Self> {
        Self::from_fn(n, |x, y| {
            if f(x, y) {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
    }
}
