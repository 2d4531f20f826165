//! Deterministic finite automata with output, read least-significant digit
//! first, and k-kernels.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expand::PeriodCertificate;

/// Default cap on the number of states produced by closure constructions.
pub const DEFAULT_STATE_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub transitions: Vec<usize>,
    pub output: usize,
}

/// The value at n is τ(δ*(initial, digits of n in base k, LSD first)).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dfao {
    pub base: usize,
    pub states: Vec<State>,
    pub initial: usize,
}

/// Base-k digits of n, least significant first (empty for n = 0).
pub fn digits_lsd(mut n: u64, k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while n > 0 {
        out.push((n % k as u64) as usize);
        n /= k as u64;
    }
    out
}

impl Dfao {
    pub fn new(base: usize, states: Vec<State>, initial: usize) -> Result<Dfao> {
        let m = Dfao { base, states, initial };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.base < 2 {
            return Err(Error::Precondition("base must be at least 2".into()));
        }
        if self.initial >= self.states.len() {
            return Err(Error::Precondition("initial state out of range".into()));
        }
        for (i, s) in self.states.iter().enumerate() {
            if s.transitions.len() != self.base || s.transitions.iter().any(|&t| t >= self.states.len()) {
                return Err(Error::Precondition(format!("state {i} has an invalid transition row")));
            }
        }
        Ok(())
    }

    /// The constant sequence c.
    pub fn constant(base: usize, c: usize) -> Dfao {
        Dfao { base, states: vec![State { transitions: vec![0; base], output: c }], initial: 0 }
    }

    pub fn from_json(s: &str) -> Result<Dfao> {
        let m: Dfao = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn step(&self, s: usize, d: usize) -> usize {
        self.states[s].transitions[d]
    }

    pub fn run_from(&self, s: usize, digits: &[usize]) -> usize {
        digits.iter().fold(s, |s, &d| self.step(s, d))
    }

    pub fn eval_from(&self, s: usize, n: u64) -> usize {
        self.states[self.run_from(s, &digits_lsd(n, self.base))].output
    }

    pub fn eval(&self, n: u64) -> usize {
        self.eval_from(self.initial, n)
    }

    /// a(0), …, a(len−1).
    pub fn sequence(&self, len: usize) -> Vec<usize> {
        (0..len as u64).map(|n| self.eval(n)).collect()
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            for &t in &self.states[s].transitions {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// Appending zero digits (leading zeros of n) never changes the output.
    pub fn is_padding_consistent(&self) -> bool {
        let reach = self.reachable();
        self.states.iter().enumerate().all(|(i, s)| !reach[i] || self.states[s.transitions[0]].output == s.output)
    }

    /// Moore partition refinement on the reachable part; states are
    /// renumbered in breadth-first order from the initial state.
    pub fn minimize(&self) -> Dfao {
        let reach = self.reachable();
        let live: Vec<usize> = (0..self.states.len()).filter(|&i| reach[i]).collect();
        let mut class = vec![usize::MAX; self.states.len()];
        {
            let mut ids: HashMap<usize, usize> = HashMap::new();
            for &s in &live {
                let n = ids.len();
                class[s] = *ids.entry(self.states[s].output).or_insert(n);
            }
        }
        let mut count = live.iter().map(|&s| class[s]).max().map_or(0, |c| c + 1);
        loop {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![usize::MAX; self.states.len()];
            for &s in &live {
                let sig = (class[s], self.states[s].transitions.iter().map(|&t| class[t]).collect());
                let n = ids.len();
                next[s] = *ids.entry(sig).or_insert(n);
            }
            let new_count = ids.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // breadth-first renumbering of the quotient
        let rep: HashMap<usize, usize> = live.iter().rev().map(|&s| (class[s], s)).collect();
        let mut order: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::from([class[self.initial]]);
        order.insert(class[self.initial], 0);
        let mut states = Vec::new();
        while let Some(c) = queue.pop_front() {
            let s = rep[&c];
            let mut transitions = Vec::with_capacity(self.base);
            for &t in &self.states[s].transitions {
                let n = order.len();
                let id = *order.entry(class[t]).or_insert_with(|| {
                    queue.push_back(class[t]);
                    n
                });
                transitions.push(id);
            }
            states.push(State { transitions, output: self.states[s].output });
        }
        Dfao { base: self.base, states, initial: 0 }
    }

    /// Relabels outputs.
    pub fn map_outputs(&self, f: impl Fn(usize) -> usize) -> Dfao {
        let states =
            self.states.iter().map(|s| State { transitions: s.transitions.clone(), output: f(s.output) }).collect();
        Dfao { base: self.base, states, initial: self.initial }
    }

    /// The same sequence read in base k^j (groups of j digits).
    pub fn to_power_base(&self, j: u32) -> Dfao {
        let kk = self.base.pow(j);
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(s, st)| State {
                transitions: (0..kk)
                    .map(|d| self.run_from(s, &digits_padded(d as u64, self.base, j as usize)))
                    .collect(),
                output: st.output,
            })
            .collect();
        Dfao { base: kk, states, initial: self.initial }
    }

    /// The same sequence read in base k, for a base-k^j automaton.
    pub fn to_root_base(&self, k: usize) -> Result<Dfao> {
        let j = (1..=64u32)
            .find(|&j| k.checked_pow(j) == Some(self.base))
            .ok_or_else(|| Error::Precondition(format!("base {} is not a power of {k}", self.base)))?
            as usize;
        // state (s, partial value v, digits read c) with c < j
        build_closure(
            k,
            (self.initial, 0usize, 0usize),
            |&(s, v, c), r| {
                let v = v + r * k.pow(c as u32);
                if c + 1 == j {
                    (self.step(s, v), 0, 0)
                } else {
                    (s, v, c + 1)
                }
            },
            |&(s, v, c)| if c == 0 { self.states[s].output } else { self.states[self.step(s, v)].output },
            DEFAULT_STATE_CAP,
        )
        .map(|m| m.minimize())
    }

    /// The sequence with a(0) replaced by c.
    pub fn override_zero(&self, c: usize) -> Dfao {
        build_closure(
            self.base,
            (self.initial, true),
            |&(s, zero), r| (self.step(s, r), zero && r == 0),
            |&(s, zero)| if zero { c } else { self.states[s].output },
            DEFAULT_STATE_CAP,
        )
        .expect("at most twice the states")
        .minimize()
    }

    /// b(0) = c and b(n) = a(n − 1) for n ≥ 1.
    pub fn shift_by_one(&self, c: usize) -> Dfao {
        let k = self.base;
        build_closure(
            k,
            (self.initial, true),
            |&(s, borrow), r| {
                if borrow {
                    if r == 0 {
                        (self.step(s, k - 1), true)
                    } else {
                        (self.step(s, r - 1), false)
                    }
                } else {
                    (self.step(s, r), false)
                }
            },
            |&(s, borrow)| if borrow { c } else { self.states[s].output },
            DEFAULT_STATE_CAP,
        )
        .expect("at most twice the states")
        .minimize()
    }
}

fn digits_padded(mut n: u64, k: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = (n % k as u64) as usize;
            n /= k as u64;
            d
        })
        .collect()
}

/// Breadth-first closure of a state space under k successor maps.
pub fn build_closure<S: Clone + Eq + Hash>(
    base: usize,
    init: S,
    step: impl Fn(&S, usize) -> S,
    output: impl Fn(&S) -> usize,
    cap: usize,
) -> Result<Dfao> {
    let mut index: HashMap<S, usize> = HashMap::from([(init.clone(), 0)]);
    let mut queue = VecDeque::from([init]);
    let mut states: Vec<State> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let mut transitions = Vec::with_capacity(base);
        for r in 0..base {
            let t = step(&s, r);
            let n = index.len();
            let id = match index.get(&t) {
                Some(&id) => id,
                None => {
                    if n >= cap {
                        return Err(Error::AutomatonCap { cap, degree: 0 });
                    }
                    index.insert(t.clone(), n);
                    queue.push_back(t);
                    n
                }
            };
            transitions.push(id);
        }
        states.push(State { transitions, output: output(&s) });
    }
    Ok(Dfao { base, states, initial: 0 })
}

/// Product automaton with combined output f(outputs).
pub fn product(ms: &[&Dfao], f: impl Fn(&[usize]) -> usize) -> Result<Dfao> {
    let base = ms.first().ok_or_else(|| Error::Precondition("empty product".into()))?.base;
    if ms.iter().any(|m| m.base != base) {
        return Err(Error::Precondition("product of automata in different bases".into()));
    }
    let init: Vec<usize> = ms.iter().map(|m| m.initial).collect();
    build_closure(
        base,
        init,
        |s, r| s.iter().zip(ms).map(|(&q, m)| m.step(q, r)).collect(),
        |s| {
            let outs: Vec<usize> = s.iter().zip(ms).map(|(&q, m)| m.states[q].output).collect();
            f(&outs)
        },
        DEFAULT_STATE_CAP,
    )
}

/// The k-kernel {n ↦ a(n·k^i + j)}: one automaton per distinct element,
/// obtained by moving the initial state of the minimized automaton.
pub fn kernel_of_dfao(m: &Dfao) -> Result<Vec<Dfao>> {
    if !m.is_padding_consistent() {
        return Err(Error::Precondition("automaton is not padding-consistent".into()));
    }
    let min = m.minimize();
    Ok((0..min.states.len()).map(|s| Dfao { initial: s, ..min.clone() }).collect())
}

/// Distinct-prefix counts of the kernel subsequences of a finite prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelProfile {
    pub k: usize,
    pub depth: usize,
    pub prefix_len: usize,
    pub len: usize,
    /// counts[d] = #{distinct length-len prefixes of S_{i,j} : i ≤ d}.
    pub counts: Vec<usize>,
}

impl KernelProfile {
    pub fn is_bounded_by(&self, b: usize) -> bool {
        self.counts.iter().all(|&c| c <= b)
    }

    /// Whether the counts strictly increase from depth `from` to `to`.
    pub fn strictly_increasing(&self, from: usize, to: usize) -> bool {
        (from..to).all(|d| self.counts[d] < self.counts[d + 1])
    }
}

/// Kernel profile; needs len·k^D ≤ prefix length so that every
/// a(n·k^i + j) with n < len, i ≤ D lies inside the prefix.
pub fn kernel_profile(prefix: &[usize], k: usize, depth: usize, len: usize) -> Result<KernelProfile> {
    let need = k.checked_pow(depth as u32).and_then(|p| p.checked_mul(len));
    if need.is_none_or(|n| n > prefix.len()) || k < 2 || len == 0 {
        return Err(Error::Precondition(format!(
            "kernel profile with k={k}, depth={depth}, len={len} needs a prefix of len·k^depth terms, got {}",
            prefix.len()
        )));
    }
    let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
    let mut counts = Vec::with_capacity(depth + 1);
    let mut ki = 1usize;
    for _ in 0..=depth {
        for j in 0..ki {
            seen.insert((0..len).map(|n| prefix[n * ki + j]).collect());
        }
        counts.push(seen.len());
        ki *= k;
    }
    Ok(KernelProfile { k, depth, prefix_len: prefix.len(), len, counts })
}

/// An automaton for n ↦ a_{m+n} from an exact period certificate.
pub fn periodic_to_dfao(cert: &PeriodCertificate, k: usize) -> Result<Dfao> {
    if !cert.is_exact() {
        return Err(Error::Precondition("periodic_to_dfao needs an exact certificate".into()));
    }
    let n0 = (cert.preperiod - cert.m) as usize;
    let l = cert.period;
    let t = n0 + l;
    // every n ↦ a(cn + d) again has preperiod ≤ N and period dividing L,
    // so it is determined by its first N + L values
    let value = |b: &Vec<usize>, n: usize| if n < t { b[n] } else { b[n0 + (n - n0) % l] };
    let init: Vec<usize> = cert.digits.clone();
    Ok(build_closure(k, init, |b, r| (0..t).map(|n| value(b, k * n + r)).collect(), |b| b[0], DEFAULT_STATE_CAP)?
        .minimize())
}
