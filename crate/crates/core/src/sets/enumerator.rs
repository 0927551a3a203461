use std::collections::HashMap;
use std::fmt;
use std::iter::Peekable;
use std::sync::{Arc, Mutex};

use crate::compute::{BudgetedFn, Dovetail, Outcome};
use crate::strings::{LexString, Shortlex};

/// One step of an enumerating machine: it either prints a string or works.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tick {
    Emit(LexString),
    Idle,
}

/// Answer of a budgeted lookup in an enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup {
    /// Emitted as the `position`-th string (0-based) at tick `tick`.
    Found { position: usize, tick: u64 },
    /// The enumeration finished without it.
    Absent,
    /// Not seen within the tick budget.
    NotYet,
}

struct Cursor {
    source: Peekable<Box<dyn Iterator<Item = Tick> + Send>>,
    ticks: u64,
    emitted: Vec<(LexString, u64)>,
    positions: HashMap<LexString, usize>,
    exhausted_at: Option<u64>,
    dedup: bool,
}

impl Cursor {
    fn advance_to(&mut self, ticks: u64) {
        self.advance_until(ticks, |_| false);
    }

    /// Advances until `done` holds or `ticks` is reached, whichever is first.
    fn advance_until(&mut self, ticks: u64, done: impl Fn(&Cursor) -> bool) {
        while self.exhausted_at.is_none() && self.ticks < ticks && !done(self) {
            match self.source.next() {
                None => self.exhausted_at = Some(self.ticks),
                Some(tick) => {
                    self.ticks += 1;
                    if let Tick::Emit(x) = tick {
                        if self.dedup && self.positions.contains_key(&x) {
                            continue;
                        }
                        self.positions.entry(x.clone()).or_insert(self.emitted.len());
                        self.emitted.push((x, self.ticks));
                    }
                }
            }
        }
        // an enumeration that ends right at the budget counts as ended there
        if self.exhausted_at.is_none() && self.ticks >= ticks && self.source.peek().is_none() {
            self.exhausted_at = Some(self.ticks);
        }
    }

    fn exhausted_within(&self, ticks: u64) -> bool {
        self.exhausted_at.is_some_and(|t| t <= ticks)
    }
}

/// A resumable, shared enumeration of strings.
///
/// Clones share one cursor and its cache, so a string found once stays
/// found. Answers depend only on the tick budget asked for, never on how far
/// some other caller already advanced the cursor.
#[derive(Clone)]
pub struct Enumerator {
    name: Arc<str>,
    cursor: Arc<Mutex<Cursor>>,
}

impl fmt::Debug for Enumerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Enumerator({})", self.name)
    }
}

impl Enumerator {
    pub fn from_ticks<I>(name: impl Into<Arc<str>>, ticks: I) -> Self
    where
        I: IntoIterator<Item = Tick>,
        I::IntoIter: Send + 'static,
    {
        Self {
            name: name.into(),
            cursor: Arc::new(Mutex::new(Cursor {
                source: (Box::new(ticks.into_iter()) as Box<dyn Iterator<Item = Tick> + Send>)
                    .peekable(),
                ticks: 0,
                emitted: Vec::new(),
                positions: HashMap::new(),
                exhausted_at: None,
                dedup: false,
            })),
        }
    }

    /// One emission per tick.
    pub fn from_strings<I>(name: impl Into<Arc<str>>, strings: I) -> Self
    where
        I: IntoIterator<Item = LexString>,
        I::IntoIter: Send + 'static,
    {
        Self::from_ticks(name, strings.into_iter().map(Tick::Emit))
    }

    pub fn finite(name: impl Into<Arc<str>>, strings: Vec<LexString>) -> Self {
        Self::from_strings(name, strings)
    }

    /// Walks Σ* in shortlex order, one tick per string, emitting those the
    /// predicate accepts.
    pub fn filter<P>(name: impl Into<Arc<str>>, pred: P) -> Self
    where
        P: Fn(&LexString) -> bool + Send + 'static,
    {
        Self::from_ticks(
            name,
            Shortlex::new().map(move |x| if pred(&x) { Tick::Emit(x) } else { Tick::Idle }),
        )
    }

    /// Enumerates the accepting domain of `f` by dovetailing it over Σ*;
    /// every billed step is one tick.
    pub fn acceptance_of(name: impl Into<Arc<str>>, f: BudgetedFn) -> Self {
        let mut dove = Dovetail::new(f, Shortlex::new());
        let mut backlog = 0u64;
        let ticks = std::iter::from_fn(move || {
            if backlog > 0 {
                backlog -= 1;
                return Some(Tick::Idle);
            }
            loop {
                let before = dove.charged();
                // no single bill exceeds the next round number
                let res = dove.next_within(before + dove.round() + 1);
                let spent = dove.charged() - before;
                match res {
                    Ok(None) => return None,
                    Ok(Some(e)) if matches!(e.outcome, Outcome::Halt(_)) => {
                        backlog = spent.saturating_sub(1);
                        return Some(Tick::Emit(e.input));
                    }
                    _ if spent > 0 => {
                        backlog = spent - 1;
                        return Some(Tick::Idle);
                    }
                    _ => {}
                }
            }
        });
        Self::from_ticks(name, ticks)
    }

    /// Drops repeated emissions (they become idle ticks). Apply before the
    /// cursor is first advanced.
    pub fn repetition_free(self) -> Self {
        self.cursor.lock().expect("enumerator lock").dedup = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lookup(&self, x: &LexString, ticks: u64) -> Lookup {
        let mut c = self.cursor.lock().expect("enumerator lock");
        c.advance_until(ticks, |c| c.positions.contains_key(x));
        match c.positions.get(x) {
            Some(&position) if c.emitted[position].1 <= ticks => Lookup::Found {
                position,
                tick: c.emitted[position].1,
            },
            _ if c.exhausted_within(ticks) => Lookup::Absent,
            _ => Lookup::NotYet,
        }
    }

    /// The `i`-th emission (0-based) within the tick budget. `Err(true)` if
    /// the enumeration ended first, `Err(false)` if the budget did.
    pub fn nth(&self, i: usize, ticks: u64) -> Result<(LexString, u64), bool> {
        let mut c = self.cursor.lock().expect("enumerator lock");
        c.advance_until(ticks, |c| c.emitted.len() > i);
        match c.emitted.get(i) {
            Some((x, t)) if *t <= ticks => Ok((x.clone(), *t)),
            _ => Err(c.exhausted_within(ticks)),
        }
    }

    /// All emissions within the tick budget, and whether the enumeration
    /// had finished by then.
    pub fn prefix(&self, ticks: u64) -> (Vec<LexString>, bool) {
        let mut c = self.cursor.lock().expect("enumerator lock");
        c.advance_to(ticks);
        let out = c
            .emitted
            .iter()
            .take_while(|(_, t)| *t <= ticks)
            .map(|(x, _)| x.clone())
            .collect();
        (out, c.exhausted_within(ticks))
    }
}
