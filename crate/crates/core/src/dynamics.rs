//! Event-driven simulation of the continuous-time dynamics.
//!
//! All vertex clocks are aggregated into a single Poisson clock of rate
//! `Λ = Σ_v λ_v`. Each event consumes, in order: an exponential holding time,
//! a vertex drawn with probability `λ_v / Λ`, a uniform `f64` for the
//! `Bern(p_v)` coin and a uniform colour in `1..=K`. The coin and colour are
//! drawn even when the coin is tails so that two chains reading the same
//! stream stay aligned.

use std::collections::HashMap;
use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{check_proper, Colour, Configuration, ModelParams, UpdateDraw};
use crate::rng::rng_from_seed;

/// Produces the update draws of one chain.
pub struct DrawStream {
    rng: ChaCha8Rng,
    holding: Exp<f64>,
    vertices: WeightedAliasIndex<f64>,
    p: Vec<f64>,
    colours: Colour,
    time: f64,
}

impl DrawStream {
    pub fn new(params: &ModelParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let holding = Exp::new(params.total_rate()).map_err(|e| Error::InvalidParameter(format!("total rate: {e}")))?;
        let vertices = WeightedAliasIndex::new(params.lambda.clone())
            .map_err(|e| Error::InvalidParameter(format!("vertex rates: {e}")))?;
        Ok(DrawStream {
            rng: rng_from_seed(seed),
            holding,
            vertices,
            p: params.p.clone(),
            colours: params.colours,
            time: 0.0,
        })
    }

    /// Next update, with `time` set to the absolute event time.
    pub fn next_draw(&mut self) -> UpdateDraw {
        self.time += self.holding.sample(&mut self.rng);
        let vertex = self.vertices.sample(&mut self.rng);
        let coin = self.rng.random::<f64>() < self.p[vertex];
        let colour = self.rng.random_range(1..=self.colours);
        UpdateDraw { vertex, coin, colour, time: self.time }
    }
}

/// One vertex update as seen by observers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub vertex: usize,
    pub old: Colour,
    pub new: Colour,
}

/// Receives the trajectory of a simulation. `state` is always the
/// configuration after the event.
pub trait Observer {
    fn on_start(&mut self, _time: f64, _state: &Configuration) {}
    fn on_event(&mut self, _event: &Event, _state: &Configuration) {}
    fn on_finish(&mut self, _time: f64, _state: &Configuration) {}
}

impl Observer for () {}

impl<O: Observer + ?Sized> Observer for &mut O {
    fn on_start(&mut self, time: f64, state: &Configuration) {
        (**self).on_start(time, state)
    }
    fn on_event(&mut self, event: &Event, state: &Configuration) {
        (**self).on_event(event, state)
    }
    fn on_finish(&mut self, time: f64, state: &Configuration) {
        (**self).on_finish(time, state)
    }
}

impl<A: Observer, B: Observer> Observer for (A, B) {
    fn on_start(&mut self, time: f64, state: &Configuration) {
        self.0.on_start(time, state);
        self.1.on_start(time, state);
    }
    fn on_event(&mut self, event: &Event, state: &Configuration) {
        self.0.on_event(event, state);
        self.1.on_event(event, state);
    }
    fn on_finish(&mut self, time: f64, state: &Configuration) {
        self.0.on_finish(time, state);
        self.1.on_finish(time, state);
    }
}

/// Records every event.
#[derive(Debug, Default, Clone)]
pub struct EventLog {
    pub events: Vec<Event>,
}

impl Observer for EventLog {
    fn on_event(&mut self, event: &Event, _state: &Configuration) {
        self.events.push(*event);
    }
}

impl EventLog {
    /// CSV with columns `time,vertex,old_colour,new_colour`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "vertex", "old_colour", "new_colour"])?;
        for e in &self.events {
            w.write_record([e.time.to_string(), e.vertex.to_string(), e.old.to_string(), e.new.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Time spent in each configuration.
#[derive(Debug, Default, Clone)]
pub struct StateHistogram {
    pub time_in_state: HashMap<Configuration, f64>,
    last_time: f64,
    current: Option<Configuration>,
}

impl StateHistogram {
    fn credit(&mut self, until: f64) {
        if let Some(state) = &self.current {
            *self.time_in_state.entry(state.clone()).or_insert(0.0) += until - self.last_time;
        }
        self.last_time = until;
    }

    /// Time-weighted empirical distribution.
    pub fn distribution(&self) -> HashMap<Configuration, f64> {
        let total: f64 = self.time_in_state.values().sum();
        self.time_in_state.iter().map(|(s, t)| (s.clone(), t / total)).collect()
    }
}

impl Observer for StateHistogram {
    fn on_start(&mut self, time: f64, state: &Configuration) {
        self.last_time = time;
        self.current = Some(state.clone());
    }
    fn on_event(&mut self, event: &Event, state: &Configuration) {
        if event.old != event.new {
            self.credit(event.time);
            self.current = Some(state.clone());
        }
    }
    fn on_finish(&mut self, time: f64, _state: &Configuration) {
        self.credit(time);
    }
}

/// Per-vertex active time in consecutive windows of fixed length, for
/// batch-means standard errors. A trailing partial window is dropped.
#[derive(Debug, Clone)]
pub struct BatchOccupancy {
    batch_len: f64,
    next_boundary: f64,
    since: Vec<f64>,
    active: Vec<bool>,
    current: Vec<f64>,
    /// `batches[b][v]`: fraction of window `b` during which `v` was active.
    pub batches: Vec<Vec<f64>>,
}

impl BatchOccupancy {
    pub fn new(batch_len: f64) -> Self {
        BatchOccupancy {
            batch_len,
            next_boundary: batch_len,
            since: Vec::new(),
            active: Vec::new(),
            current: Vec::new(),
            batches: Vec::new(),
        }
    }

    fn close_windows(&mut self, until: f64) {
        while until >= self.next_boundary {
            let boundary = self.next_boundary;
            for v in 0..self.active.len() {
                if self.active[v] {
                    self.current[v] += boundary - self.since[v];
                }
                self.since[v] = boundary;
            }
            let batch = self.current.iter().map(|t| t / self.batch_len).collect();
            self.batches.push(batch);
            self.current.iter_mut().for_each(|t| *t = 0.0);
            self.next_boundary += self.batch_len;
        }
    }
}

impl Observer for BatchOccupancy {
    fn on_start(&mut self, time: f64, state: &Configuration) {
        self.since = vec![time; state.len()];
        self.active = state.0.iter().map(|&c| c != 0).collect();
        self.current = vec![0.0; state.len()];
        self.next_boundary = time + self.batch_len;
    }
    fn on_event(&mut self, event: &Event, state: &Configuration) {
        self.close_windows(event.time);
        let v = event.vertex;
        if self.active[v] {
            self.current[v] += event.time - self.since[v];
        }
        self.since[v] = event.time;
        self.active[v] = state.is_active(v);
    }
    fn on_finish(&mut self, time: f64, _state: &Configuration) {
        self.close_windows(time);
    }
}

/// When a run stops: at `horizon` in model time, or after `max_events`
/// updates, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunLimit {
    pub horizon: f64,
    pub max_events: Option<u64>,
}

impl RunLimit {
    pub fn horizon(horizon: f64) -> Self {
        RunLimit { horizon, max_events: None }
    }

    pub fn events(max_events: u64) -> Self {
        RunLimit { horizon: f64::INFINITY, max_events: Some(max_events) }
    }
}

/// Summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub final_state: Configuration,
    /// Model time at which the run stopped: the horizon, or the time of the
    /// last event when stopped by an event cap.
    pub end_time: f64,
    pub events: u64,
    /// Total time each vertex spent active.
    pub active_time: Vec<f64>,
}

impl Trajectory {
    /// Time-average fraction of `[0, end_time]` each vertex was active.
    pub fn occupancy(&self) -> Vec<f64> {
        if self.end_time > 0.0 {
            self.active_time.iter().map(|t| t / self.end_time).collect()
        } else {
            self.final_state.0.iter().map(|&c| f64::from(u8::from(c != 0))).collect()
        }
    }
}

/// CSV with columns `vertex,time_active_fraction`.
pub fn write_occupancy_csv<W: Write>(occupancy: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["vertex", "time_active_fraction"])?;
    for (v, f) in occupancy.iter().enumerate() {
        w.write_record([v.to_string(), f.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the chain from `start` until `limit`.
pub fn simulate<O: Observer>(
    g: &Graph,
    params: &ModelParams,
    start: &Configuration,
    limit: RunLimit,
    seed: u64,
    mut observer: O,
) -> Result<Trajectory> {
    params.check_graph(g)?;
    check_proper(g, start, params.colours)?;
    if !(limit.horizon >= 0.0) {
        return Err(Error::InvalidParameter(format!("horizon {} must be >= 0", limit.horizon)));
    }
    if limit.horizon.is_infinite() && limit.max_events.is_none() {
        return Err(Error::InvalidParameter("unbounded run: give a horizon or an event cap".into()));
    }
    if params.p.contains(&1.0) {
        log::warn!("p_v = 1 at some vertex: the chain may not be irreducible");
    }

    let n = g.n();
    let mut state = start.clone();
    let mut active_time = vec![0.0; n];
    let mut since = vec![0.0; n];
    let mut events = 0u64;
    let mut end_time = limit.horizon;
    observer.on_start(0.0, &state);

    if n > 0 && limit.horizon > 0.0 && limit.max_events != Some(0) {
        let mut stream = DrawStream::new(params, seed)?;
        loop {
            let draw = stream.next_draw();
            if draw.time > limit.horizon {
                break;
            }
            let v = draw.vertex;
            let old = state.apply(g, &draw);
            let new = state.colour(v);
            if old != new {
                if old != 0 {
                    active_time[v] += draw.time - since[v];
                }
                since[v] = draw.time;
            }
            events += 1;
            observer.on_event(&Event { time: draw.time, vertex: v, old, new }, &state);
            if limit.max_events == Some(events) {
                end_time = draw.time;
                break;
            }
        }
    }
    if end_time.is_infinite() {
        end_time = 0.0;
    }

    for v in 0..n {
        if state.is_active(v) {
            active_time[v] += end_time - since[v];
        }
    }
    observer.on_finish(end_time, &state);
    Ok(Trajectory { final_state: state, end_time, events, active_time })
}
