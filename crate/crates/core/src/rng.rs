//! Linear congruential random streams with O(log N) skip-ahead.
//!
//! Every history owns a window of `STRIDE` draws carved out of one
//! 63-bit LCG sequence, so the random numbers a history sees depend only on
//! `(seed, history)` and never on scheduling.

const MULT: u64 = 2_806_196_910_506_780_709;
const INC: u64 = 1;
const MASK: u64 = (1u64 << 63) - 1;
const NORM: f64 = 1.0 / (1u64 << 63) as f64;

/// Draws reserved for each history.
pub const STRIDE: u64 = 152_917;

/// Raw generator state, always below 2^63.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngState(u64);

impl RngState {
    pub fn new(state: u64) -> Self {
        RngState(state & MASK)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    /// One LCG step.
    #[inline]
    pub fn step(self) -> Self {
        RngState(MULT.wrapping_mul(self.0).wrapping_add(INC) & MASK)
    }

    /// Advances the state and returns a uniform deviate in `[0, 1)`.
    #[inline]
    pub fn prn(&mut self) -> f64 {
        *self = self.step();
        let x = self.0 as f64 * NORM;
        // states within 2^9 of the top round up to exactly 1.0
        if x < 1.0 {
            x
        } else {
            1.0 - f64::EPSILON / 2.0
        }
    }

    /// Same as [`prn`](Self::prn) narrowed to single precision, kept strictly below one.
    #[inline]
    pub fn prn_f32(&mut self) -> f32 {
        narrow(self.prn())
    }

    /// Jumps `n` steps ahead in O(log n).
    pub fn skip(self, n: u64) -> Self {
        let mut n = n & MASK;
        let mut g = MULT;
        let mut c = INC;
        let mut g_new: u64 = 1;
        let mut c_new: u64 = 0;
        while n > 0 {
            if n & 1 == 1 {
                g_new = g_new.wrapping_mul(g) & MASK;
                c_new = c_new.wrapping_mul(g).wrapping_add(c) & MASK;
            }
            c = g.wrapping_add(1).wrapping_mul(c) & MASK;
            g = g.wrapping_mul(g) & MASK;
            n >>= 1;
        }
        RngState(g_new.wrapping_mul(self.0).wrapping_add(c_new) & MASK)
    }
}

#[inline]
fn narrow(x: f64) -> f32 {
    let y = x as f32;
    if y < 1.0 {
        y
    } else {
        1.0 - f32::EPSILON / 2.0
    }
}

/// Origin of the sequence for a given seed.
pub fn origin(seed: u64) -> RngState {
    RngState::new(seed)
}

/// Start of the window belonging to global history index `history`.
pub fn init_stream(seed: u64, history: u64) -> RngState {
    origin(seed).skip(history.wrapping_mul(STRIDE))
}

/// Batch-level stream used for source resampling. It lives far beyond any
/// history window so it never overlaps particle draws.
pub fn source_stream(seed: u64, batch: u64) -> Stream {
    Stream::new(origin(seed).skip((1u64 << 62).wrapping_add(batch << 32)))
}

/// A state plus a running count of draws, used to detect histories that
/// overrun their `STRIDE` window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stream {
    state: RngState,
    draws: u64,
}

impl Stream {
    pub fn new(state: RngState) -> Self {
        Stream { state, draws: 0 }
    }

    pub fn for_history(seed: u64, history: u64) -> Self {
        Stream::new(init_stream(seed, history))
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        self.draws += 1;
        self.state.prn()
    }

    #[inline]
    pub fn next_f32(&mut self) -> f32 {
        self.draws += 1;
        self.state.prn_f32()
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn state(&self) -> RngState {
        self.state
    }

    /// True once the stream has consumed more than its reserved window.
    pub fn overflowed(&self) -> bool {
        self.draws > STRIDE
    }
}
