//! Pixel observations for Mario.

use alloc::vec::Vec;

use super::mario::{Mario, MarioState};
use super::validate::{StateGraph, TrapCheck};
use super::{Environment, Probe, StateKey};

/// Side length of one grid cell in pixels.
pub const CELL_PX: usize = 4;

/// Row-major RGB image, `height × width × 3` bytes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PixelObs {
    pub height: usize,
    pub width: usize,
    pub data: Vec<u8>,
}

impl PixelObs {
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            data: alloc::vec![0; height * width * 3],
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, 3)
    }

    pub fn pixel(&self, y: usize, x: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Paints the square `[lo, hi)²` inside grid cell `(row, col)`.
    pub(crate) fn fill_cell(&mut self, row: usize, col: usize, lo: usize, hi: usize, rgb: [u8; 3]) {
        for dy in lo..hi {
            for dx in lo..hi {
                let i = ((row * CELL_PX + dy) * self.width + col * CELL_PX + dx) * 3;
                self.data[i..i + 3].copy_from_slice(&rgb);
            }
        }
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&b| b as f64).collect()
    }
}

/// 128-bit FNV-1a over the pixel bytes and the image shape.
pub fn fingerprint(obs: &PixelObs) -> StateKey {
    const OFFSET: u128 = 0x6c62_272e_07bb_0142_62b8_2175_6295_c58d;
    const PRIME: u128 = 0x0000_0000_0100_0000_0000_0000_0000_013b;
    let mut h = OFFSET;
    let dims = [(obs.height as u32).to_le_bytes(), (obs.width as u32).to_le_bytes()];
    for b in dims.iter().flatten().chain(obs.data.iter()) {
        h ^= *b as u128;
        h = h.wrapping_mul(PRIME);
    }
    StateKey(h)
}

/// Mario observed through its rendering: the Q-table key is the image
/// fingerprint instead of the symbolic state encoding.
#[derive(Clone, Debug)]
pub struct PixelMario {
    pub inner: Mario,
}

impl PixelMario {
    pub fn new(inner: Mario) -> Self {
        Self { inner }
    }
}

impl Environment for PixelMario {
    type State = MarioState;

    fn name(&self) -> &'static str {
        "pixel-mario"
    }

    fn actions(&self) -> &'static [&'static str] {
        self.inner.actions()
    }

    fn reset(&self) -> MarioState {
        self.inner.reset()
    }

    fn step(&self, s: &MarioState, a: usize) -> MarioState {
        self.inner.step(s, a)
    }

    fn is_goal(&self, s: &MarioState) -> bool {
        self.inner.is_goal(s)
    }

    fn encode(&self, s: &MarioState) -> StateKey {
        fingerprint(&self.inner.render(s))
    }

    fn probes(&self) -> &'static [&'static str] {
        self.inner.probes()
    }

    fn test(&self, s: &MarioState, p: Probe) -> bool {
        self.inner.test(s, p)
    }

    fn pixels(&self, s: &MarioState) -> Option<PixelObs> {
        Some(self.inner.render(s))
    }

    fn reference(&self) -> &[usize] {
        self.inner.reference()
    }

    fn trap_checks(&self, g: &StateGraph<MarioState>) -> Vec<TrapCheck> {
        self.inner.trap_checks(g)
    }
}
