//! Control-interface automaton.
//!
//! Serial word format: a 2-bit shift register clocked MSB first, so after
//! two rising CLK edges carrying `a` then `b` the register holds
//! `(D1, D0) = (a, b)`. Within one sample the shift happens before the
//! latch, i.e. a CLK and an LE rising edge on the same sample latch the
//! freshly shifted word.

use super::{MuxError, MuxModel, Port, PortMap};
use serde::{Deserialize, Serialize};

pub const SHIFT_REGISTER_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProgrammingMode {
    Serial,
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuxDigitalState {
    pub mode: ProgrammingMode,
    /// Oldest bit first; the last element is the most recently clocked bit.
    pub shift_register: [bool; SHIFT_REGISTER_WIDTH],
    pub latched_word: (bool, bool),
    pub ps: bool,
    pub le: bool,
    /// Last sampled CLK level, for edge detection across calls.
    pub clk: bool,
    /// `None` when the chip is deselected and configured as all-off.
    pub selected_port: Option<Port>,
    pub port_map: PortMap,
    pub le_low_all_off: bool,
}

impl MuxDigitalState {
    /// Power-on state in the given mode: register and latch cleared, which
    /// selects the port mapped to word `(0, 0)`. Parallel mode starts with
    /// LE high.
    pub fn power_on(model: &MuxModel, mode: ProgrammingMode) -> Self {
        let serial = mode == ProgrammingMode::Serial;
        Self {
            mode,
            shift_register: [false; SHIFT_REGISTER_WIDTH],
            latched_word: (false, false),
            ps: serial,
            le: !serial,
            clk: false,
            selected_port: Some(model.port_map.port(false, false)),
            port_map: model.port_map,
            le_low_all_off: model.le_low_all_off,
        }
    }

    /// Drives the PS line. Going low resets every sequential element.
    pub fn with_ps(&self, ps: bool) -> Self {
        let mut next = self.clone();
        next.ps = ps;
        if ps {
            next.mode = ProgrammingMode::Serial;
            next.le = false;
            next.selected_port = Some(next.port_map.port(next.latched_word.0, next.latched_word.1));
        } else {
            next.mode = ProgrammingMode::Parallel;
            next.shift_register = [false; SHIFT_REGISTER_WIDTH];
            next.latched_word = (false, false);
            next.clk = false;
        }
        next
    }

    /// Whether any RF path is conducting.
    pub fn rf_active(&self) -> bool {
        self.selected_port.is_some()
    }
}

/// Sampled control lines for a serial programming burst. All three streams
/// are level samples on a common time base; edges are detected between
/// consecutive samples (and against the state's previous levels for the
/// first sample).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SerialFrame {
    pub clk: Vec<bool>,
    pub serin: Vec<bool>,
    pub le: Vec<bool>,
}

impl SerialFrame {
    /// Builds a frame that clocks `bits` MSB first, optionally followed by an
    /// LE pulse. Each bit takes two samples (CLK low, CLK high).
    pub fn for_bits(bits: &[bool], latch: bool) -> Self {
        let mut f = SerialFrame::default();
        for &b in bits {
            f.push(false, b, false);
            f.push(true, b, false);
        }
        if latch {
            f.push(false, false, false);
            f.push(false, false, true);
            f.push(false, false, false);
        }
        f
    }

    /// Frame selecting `port` through `map`, latched or not.
    pub fn for_port(map: &PortMap, port: Port, latch: bool) -> Self {
        let (d1, d0) = map.word(port);
        Self::for_bits(&[d1, d0], latch)
    }

    pub fn push(&mut self, clk: bool, serin: bool, le: bool) {
        self.clk.push(clk);
        self.serin.push(serin);
        self.le.push(le);
    }

    pub fn extend(&mut self, other: &SerialFrame) {
        self.clk.extend_from_slice(&other.clk);
        self.serin.extend_from_slice(&other.serin);
        self.le.extend_from_slice(&other.le);
    }
}

/// Runs a serial burst through the shift register and latch.
pub fn program_serial(state: &MuxDigitalState, frame: &SerialFrame) -> Result<MuxDigitalState, MuxError> {
    let n = frame.clk.len();
    if frame.serin.len() != n || frame.le.len() != n {
        return Err(MuxError::Protocol(format!(
            "stream lengths differ: clk={}, serin={}, le={}",
            n,
            frame.serin.len(),
            frame.le.len()
        )));
    }
    let mut s = state.clone();
    let mut prev_le = s.le;
    for i in 0..n {
        let clk = frame.clk[i];
        let le = frame.le[i];
        let le_rise = le && !prev_le;
        if !s.ps {
            if le_rise {
                return Err(MuxError::ModeViolation(format!(
                    "LE pulse at sample {i} while PS is low (parallel mode)"
                )));
            }
            // Sequential logic is held in reset.
            prev_le = le;
            continue;
        }
        if clk && !s.clk {
            s.shift_register.rotate_left(1);
            s.shift_register[SHIFT_REGISTER_WIDTH - 1] = frame.serin[i];
        }
        s.clk = clk;
        if le_rise {
            s.latched_word = (s.shift_register[0], s.shift_register[1]);
            s.selected_port = Some(s.port_map.port(s.latched_word.0, s.latched_word.1));
        }
        prev_le = le;
    }
    s.le = prev_le;
    Ok(s)
}

/// Combinational port selection from the D lines. LE acts as chip select.
pub fn program_parallel(state: &MuxDigitalState, d1: bool, d0: bool, le: bool) -> Result<MuxDigitalState, MuxError> {
    if state.ps {
        return Err(MuxError::ModeViolation("parallel programming while PS is high".into()));
    }
    let mut s = state.clone();
    s.le = le;
    if le {
        s.selected_port = Some(s.port_map.port(d1, d0));
    } else if s.le_low_all_off {
        s.selected_port = None;
    }
    Ok(s)
}
