//! The reference machine: an eight-opcode bit-tape interpreter.
//!
//! Programs are read as consecutive 3-bit opcodes, most significant bit first:
//!
//! | bits | op  | effect                                              |
//! |------|-----|-----------------------------------------------------|
//! | 000  | `>` | head right                                          |
//! | 001  | `<` | head left                                           |
//! | 010  | `~` | flip current cell                                   |
//! | 011  | `[` | if cell = 0, jump past the matching `]`             |
//! | 100  | `]` | if cell = 1, jump to just after the matching `[`    |
//! | 101  | `.` | append current cell to the output                   |
//! | 110  | `,` | load next aux bit into the cell (0 once exhausted)  |
//! | 111  | HALT|                                                     |
//!
//! The tape is binary, unbounded in both directions and zero-initialised.
//! Every executed opcode (HALT included) is one step. Fetching with fewer
//! than three program bits left is a failure, and only HALT yields a
//! halting run.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;

/// Version tag of the opcode semantics. Any semantic change must bump it;
/// it is embedded in every cache key and report.
pub const MACHINE_VERSION: &str = "ISLAB-M1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Right,
    Left,
    Flip,
    Open,
    Close,
    Print,
    Read,
    Halt,
}

impl Op {
    pub fn from_code(code: u8) -> Op {
        match code & 0b111 {
            0b000 => Op::Right,
            0b001 => Op::Left,
            0b010 => Op::Flip,
            0b011 => Op::Open,
            0b100 => Op::Close,
            0b101 => Op::Print,
            0b110 => Op::Read,
            _ => Op::Halt,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Op::Right => 0b000,
            Op::Left => 0b001,
            Op::Flip => 0b010,
            Op::Open => 0b011,
            Op::Close => 0b100,
            Op::Print => 0b101,
            Op::Read => 0b110,
            Op::Halt => 0b111,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Op::Right => '>',
            Op::Left => '<',
            Op::Flip => '~',
            Op::Open => '[',
            Op::Close => ']',
            Op::Print => '.',
            Op::Read => ',',
            Op::Halt => '!',
        }
    }

    pub fn from_symbol(c: char) -> Option<Op> {
        (0..8).map(Op::from_code).find(|op| op.symbol() == c)
    }
}

/// A candidate program. Any bit string is a candidate; validity is a static
/// predicate checked by [`Program::is_valid`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Program(pub BitString);

impl Program {
    pub fn new(code: BitString) -> Self {
        Program(code)
    }

    /// The `len`-bit program whose bits spell `index` in binary.
    pub fn from_index(index: u64, len: usize) -> Self {
        Program(BitString::from_uint(index, len))
    }

    /// Builds a program from opcodes.
    pub fn from_ops(ops: &[Op]) -> Self {
        let mut code = BitString::empty();
        for op in ops {
            code.extend_from(&BitString::from_uint(op.code() as u64, 3));
        }
        Program(code)
    }

    /// Parses the symbolic form, e.g. `"~.!"`; whitespace is ignored.
    pub fn from_symbols(text: &str) -> Result<Self, crate::error::Error> {
        let ops = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                Op::from_symbol(c)
                    .ok_or_else(|| crate::error::Error::Parse(format!("unknown opcode {c:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_ops(&ops))
    }

    pub fn symbols(&self) -> String {
        self.ops().into_iter().map(Op::symbol).collect()
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The complete 3-bit opcodes; a trailing partial opcode is ignored.
    pub fn ops(&self) -> Vec<Op> {
        self.0
            .bits()
            .chunks_exact(3)
            .map(|c| Op::from_code(((c[0] as u8) << 2) | ((c[1] as u8) << 1) | c[2] as u8))
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        Decoded::from_ops(self.ops()).is_some()
    }

    pub fn uses_aux(&self) -> bool {
        self.ops().contains(&Op::Read)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunKind {
    Halted,
    Failed,
    OutOfBudget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub kind: RunKind,
    pub output: BitString,
    pub steps: u64,
    /// `print_times[k]` is the step after which the output first had length
    /// `k`; `print_times[0] == 0`.
    pub print_times: Vec<u64>,
}

impl RunOutcome {
    pub fn halted_with(&self, x: &BitString) -> bool {
        self.kind == RunKind::Halted && &self.output == x
    }

    /// Step at which the output buffer first equalled `x`, if it ever did.
    pub fn print_time(&self, x: &BitString) -> Option<u64> {
        if self.output.starts_with(x) {
            self.print_times.get(x.len()).copied()
        } else {
            None
        }
    }
}

/// Runs `program` on auxiliary input `aux` for at most `max_steps` steps.
///
/// Never errors: statically invalid programs and truncated fetches come back
/// as [`RunKind::Failed`].
pub fn run(program: &Program, aux: &BitString, max_steps: u64) -> RunOutcome {
    let mut recorder = Recorder::default();
    let (kind, steps) = match Decoded::new(program) {
        Some(decoded) => decoded.execute(aux.bits(), max_steps, &mut recorder),
        None => (RunKind::Failed, 0),
    };
    RunOutcome {
        kind,
        output: BitString::from_bits(recorder.output),
        steps,
        print_times: recorder.print_times,
    }
}

/// Receives output bits as they are printed.
pub(crate) trait OutputSink {
    /// Called after the step numbered `step` printed `bit`. Returning `false`
    /// stops the run immediately.
    fn emit(&mut self, bit: bool, step: u64) -> bool;
}

#[derive(Debug)]
struct Recorder {
    output: Vec<bool>,
    print_times: Vec<u64>,
}

impl Default for Recorder {
    fn default() -> Self {
        Recorder {
            output: Vec::new(),
            print_times: vec![0],
        }
    }
}

impl OutputSink for Recorder {
    fn emit(&mut self, bit: bool, step: u64) -> bool {
        self.output.push(bit);
        self.print_times.push(step);
        true
    }
}

/// Why [`Decoded::execute`] returned when a sink asked to stop.
pub(crate) const STOPPED: RunKind = RunKind::Failed;

/// A statically valid program with its bracket table resolved.
#[derive(Clone, Debug)]
pub(crate) struct Decoded {
    ops: Vec<Op>,
    jumps: Vec<usize>,
}

impl Decoded {
    pub(crate) fn new(program: &Program) -> Option<Decoded> {
        Self::from_ops(program.ops())
    }

    /// Decodes the `len`-bit program spelling `index`, without building the
    /// intermediate bit string.
    pub(crate) fn from_index(index: u64, len: usize) -> Option<Decoded> {
        let n = len / 3;
        let ops = (0..n)
            .map(|i| Op::from_code(((index >> (len - 3 * (i + 1))) & 0b111) as u8))
            .collect();
        Self::from_ops(ops)
    }

    fn from_ops(ops: Vec<Op>) -> Option<Decoded> {
        let mut jumps = vec![0usize; ops.len()];
        let mut stack = Vec::new();
        for (i, op) in ops.iter().enumerate() {
            match op {
                Op::Open => stack.push(i),
                Op::Close => {
                    let j = stack.pop()?;
                    jumps[i] = j;
                    jumps[j] = i;
                }
                _ => {}
            }
        }
        if !stack.is_empty() {
            return None;
        }
        Some(Decoded { ops, jumps })
    }

    /// Executes the program. When the sink stops the run, the returned kind
    /// is [`STOPPED`] and the caller is expected to know why.
    pub(crate) fn execute<S: OutputSink>(
        &self,
        aux: &[bool],
        max_steps: u64,
        sink: &mut S,
    ) -> (RunKind, u64) {
        let mut tape = Tape::default();
        let mut aux_pos = 0usize;
        let mut pc = 0usize;
        let mut steps = 0u64;
        loop {
            let Some(&op) = self.ops.get(pc) else {
                return (RunKind::Failed, steps);
            };
            if steps >= max_steps {
                return (RunKind::OutOfBudget, steps);
            }
            steps += 1;
            match op {
                Op::Right => tape.head += 1,
                Op::Left => tape.head -= 1,
                Op::Flip => {
                    let c = tape.get();
                    tape.set(!c);
                }
                Op::Open => {
                    if !tape.get() {
                        pc = self.jumps[pc];
                    }
                }
                Op::Close => {
                    if tape.get() {
                        pc = self.jumps[pc];
                    }
                }
                Op::Print => {
                    if !sink.emit(tape.get(), steps) {
                        return (STOPPED, steps);
                    }
                }
                Op::Read => {
                    let bit = aux.get(aux_pos).copied().unwrap_or(false);
                    aux_pos += 1;
                    tape.set(bit);
                }
                Op::Halt => return (RunKind::Halted, steps),
            }
            pc += 1;
        }
    }
}

/// Two half-tapes around the origin; cells beyond the allocated range read 0.
#[derive(Default)]
struct Tape {
    right: Vec<bool>,
    left: Vec<bool>,
    head: i64,
}

impl Tape {
    fn get(&self) -> bool {
        if self.head >= 0 {
            self.right.get(self.head as usize).copied().unwrap_or(false)
        } else {
            self.left
                .get((-self.head - 1) as usize)
                .copied()
                .unwrap_or(false)
        }
    }

    fn set(&mut self, v: bool) {
        let (half, idx) = if self.head >= 0 {
            (&mut self.right, self.head as usize)
        } else {
            (&mut self.left, (-self.head - 1) as usize)
        };
        if idx >= half.len() {
            if !v {
                return;
            }
            half.resize(idx + 1, false);
        }
        half[idx] = v;
    }
}
