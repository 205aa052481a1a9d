use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    nested_depth, NestedIntervalFamily, Painter, PresenterAction, RecursivePainter,
    WEvent, WGameError, WGameState,
};
use crate::game::GameRng;
use crate::poset::{Interval, Point};

pub trait Presenter {
    /// Next action, or `None` to stop.
    fn next_action(&mut self, state: &WGameState, rng: &mut GameRng) -> Option<PresenterAction>;
}

/// Random legal actions drawn per scenario weights `[assign, present, ask]`.
#[derive(Debug, Clone)]
pub struct FuzzPresenter {
    pub mix: [f64; 3],
    /// Presentations stop after this many, so every game terminates.
    pub max_presents: usize,
    /// Chance that a presentation targets an interval strictly nested in an
    /// earlier one, forbidding the partner color `c ± 1` of its color.
    pub nest_bias: f64,
    presents: usize,
}

impl FuzzPresenter {
    pub fn new(mix: [f64; 3], max_presents: usize) -> Self {
        FuzzPresenter {
            mix,
            max_presents,
            nest_bias: 0.0,
            presents: 0,
        }
    }

    pub fn with_nest_bias(mut self, p: f64) -> Self {
        self.nest_bias = p;
        self
    }

    fn nested_presentation(&self, state: &WGameState, rng: &mut GameRng) -> Option<PresenterAction> {
        let list = state.family_intervals()?;
        let mut cands = Vec::new();
        for &(big, f) in state.presented() {
            let partner = if f % 2 == 1 { f + 1 } else { f - 1 };
            for &interval in list {
                if interval.strictly_inside(&big) && state.can_present(&interval, partner) {
                    cands.push(PresenterAction::Present {
                        interval,
                        forbidden: partner,
                    });
                }
            }
        }
        (!cands.is_empty()).then(|| cands[rng.gen_range(0..cands.len())])
    }

    fn random_presentation(&self, state: &WGameState, rng: &mut GameRng) -> Option<PresenterAction> {
        let m = state.m();
        let pal = state.palette();
        let draw = |rng: &mut GameRng| -> Interval {
            match state.family_intervals() {
                Some(list) => list[rng.gen_range(0..list.len())],
                None => {
                    let lo = rng.gen_range(0..m);
                    Interval::new(lo, rng.gen_range(lo..m))
                }
            }
        };
        if state.family_intervals().is_some_and(|l| l.is_empty()) {
            return None;
        }
        if self.nest_bias > 0.0 && rng.gen_bool(self.nest_bias) {
            if let Some(a) = self.nested_presentation(state, rng) {
                return Some(a);
            }
        }
        for _ in 0..32 {
            let (interval, forbidden) = (draw(rng), rng.gen_range(1..=pal));
            if state.can_present(&interval, forbidden) {
                return Some(PresenterAction::Present { interval, forbidden });
            }
        }
        let all: Vec<Interval> = match state.family_intervals() {
            Some(l) => l.to_vec(),
            None => (0..m).flat_map(|lo| (lo..m).map(move |hi| Interval::new(lo, hi))).collect(),
        };
        let legal: Vec<PresenterAction> = all
            .iter()
            .flat_map(|&interval| {
                (1..=pal)
                    .filter(move |&c| state.can_present(&interval, c))
                    .map(move |forbidden| PresenterAction::Present { interval, forbidden })
            })
            .collect();
        (!legal.is_empty()).then(|| legal[rng.gen_range(0..legal.len())])
    }
}

impl Presenter for FuzzPresenter {
    fn next_action(&mut self, state: &WGameState, rng: &mut GameRng) -> Option<PresenterAction> {
        if state.is_over() {
            return None;
        }
        let free: Vec<Point> = state.uncolored_points().collect();
        let mut w = self.mix;
        if self.presents >= self.max_presents {
            w[1] = 0.0;
        }
        // lean on asks near the end
        if free.len() * 4 <= state.m() {
            w[2] *= 4.0;
        }
        let total: f64 = w.iter().sum();
        let mut scenario = 2;
        if total > 0.0 {
            let mut r = rng.gen_range(0.0..total);
            for (s, &ws) in w.iter().enumerate() {
                if r < ws {
                    scenario = s;
                    break;
                }
                r -= ws;
            }
        }
        let point = free[rng.gen_range(0..free.len())];
        match scenario {
            0 => {
                let avail = state.available_colors(point);
                let color = avail[rng.gen_range(0..avail.len())];
                Some(PresenterAction::Assign { point, color })
            }
            1 => {
                self.presents += 1;
                Some(
                    self.random_presentation(state, rng)
                        .unwrap_or(PresenterAction::Ask { point }),
                )
            }
            _ => Some(PresenterAction::Ask { point }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScriptedPresenter {
    actions: Vec<PresenterAction>,
    pos: usize,
}

impl ScriptedPresenter {
    pub fn new(actions: Vec<PresenterAction>) -> Self {
        ScriptedPresenter { actions, pos: 0 }
    }
}

impl Presenter for ScriptedPresenter {
    fn next_action(&mut self, state: &WGameState, _rng: &mut GameRng) -> Option<PresenterAction> {
        if state.is_over() {
            return None;
        }
        let a = self.actions.get(self.pos).copied();
        self.pos += 1;
        a
    }
}

/// Forbid the lone color on `[p, p]`, then ask `p`.
pub fn necessity_script(p: Point) -> Vec<PresenterAction> {
    vec![
        PresenterAction::Present {
            interval: Interval::new(p, p),
            forbidden: 1,
        },
        PresenterAction::Ask { point: p },
    ]
}

/// Random family on `0..m` with nesting depth at most `w - 1`.
pub fn random_family(m: usize, w: usize, size: usize, rng: &mut GameRng) -> NestedIntervalFamily {
    let mut out: Vec<Interval> = Vec::new();
    if w <= 1 || m == 0 {
        return NestedIntervalFamily::new(m, out);
    }
    for _ in 0..size * 20 {
        if out.len() >= size {
            break;
        }
        let lo = rng.gen_range(0..m);
        let span = if rng.gen_bool(0.5) {
            rng.gen_range(1..=m - lo)
        } else {
            rng.gen_range(1..=(m - lo).min(6))
        };
        let cand = Interval::new(lo, lo + span - 1);
        if out.contains(&cand) {
            continue;
        }
        out.push(cand);
        if nested_depth(&out) > w - 1 {
            out.pop();
        }
    }
    NestedIntervalFamily::new(m, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WWinner {
    Painter,
    Presenter,
    /// Presenter stopped or the action cap was hit before the chain was colored.
    Unfinished,
}

#[derive(Debug, Clone, Copy)]
pub struct WGameOptions {
    /// Run the painter's exhaustive invariant audit after every round.
    pub audit: bool,
    pub max_actions: usize,
}

impl Default for WGameOptions {
    fn default() -> Self {
        WGameOptions {
            audit: false,
            max_actions: 100_000,
        }
    }
}

#[derive(Debug, Clone, Error)]
#[error("{error}")]
pub struct WGameFailure {
    pub error: WGameError,
    pub state: WGameState,
}

pub fn play_wgame<P: Painter + ?Sized>(
    mut state: WGameState,
    presenter: &mut dyn Presenter,
    painter: &mut P,
    rng: &mut GameRng,
    opts: &WGameOptions,
) -> Result<(WWinner, WGameState), WGameFailure> {
    for _ in 0..opts.max_actions {
        if state.uncolored_count() == 0 {
            return Ok((WWinner::Painter, state));
        }
        let Some(action) = presenter.next_action(&state, rng) else {
            return Ok((WWinner::Unfinished, state));
        };
        let ob = match state.apply_presenter(action) {
            Ok(ob) => ob,
            Err(error) => return Err(WGameFailure { error, state }),
        };
        if state.presenter_won() {
            return Ok((WWinner::Presenter, state));
        }
        let reply = match action {
            PresenterAction::Assign { point, color } => {
                painter.on_assign(&state, point, color).map(|_| Vec::new())
            }
            PresenterAction::Present { interval, forbidden } => {
                painter.on_present(&state, interval, forbidden)
            }
            PresenterAction::Ask { point } => painter.on_ask(&state, point).map(|c| vec![(point, c)]),
        };
        let reply = match reply {
            Ok(r) => r,
            Err(error) => return Err(WGameFailure { error, state }),
        };
        if let Err(error) = state.apply_painter(ob, &reply) {
            return Err(WGameFailure { error, state });
        }
        if opts.audit {
            if let Err(msg) = painter.audit(&state) {
                return Err(WGameFailure {
                    error: WGameError::InvariantViolated(msg),
                    state,
                });
            }
        }
    }
    let done = if state.uncolored_count() == 0 {
        WWinner::Painter
    } else {
        WWinner::Unfinished
    };
    Ok((done, state))
}

/// Everything needed to rerun a failing game against a fresh painter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WGameReproducer {
    pub w: usize,
    pub palette: u32,
    pub family: NestedIntervalFamily,
    pub actions: Vec<PresenterAction>,
    pub error: String,
}

impl WGameReproducer {
    pub fn from_failure(w: usize, family: &NestedIntervalFamily, f: &WGameFailure) -> Self {
        WGameReproducer {
            w,
            palette: f.state.palette(),
            family: family.clone(),
            actions: f
                .state
                .log()
                .iter()
                .filter_map(|e| match e {
                    WEvent::Presenter(a) => Some(*a),
                    WEvent::Painter { .. } => None,
                })
                .collect(),
            error: f.error.to_string(),
        }
    }

    pub fn replay(&self) -> Result<WWinner, WGameFailure> {
        use rand::SeedableRng;
        let state = WGameState::new(self.family.m, self.palette, Some(&self.family));
        let mut painter = RecursivePainter::new(self.w, self.family.m, Some(&self.family));
        let mut presenter = ScriptedPresenter::new(self.actions.clone());
        let mut rng = GameRng::seed_from_u64(0);
        let opts = WGameOptions {
            audit: true,
            ..Default::default()
        };
        play_wgame(state, &mut presenter, &mut painter, &mut rng, &opts).map(|r| r.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn ask_only_mix_asks() {
        let s = WGameState::new(5, 2, None);
        let mut p = FuzzPresenter::new([0.0, 0.0, 1.0], 10);
        let mut rng = GameRng::seed_from_u64(1);
        assert!(matches!(p.next_action(&s, &mut rng), Some(PresenterAction::Ask { .. })));
    }

    #[test]
    fn fuzzer_is_seed_deterministic() {
        let run = |seed| {
            let mut rng = GameRng::seed_from_u64(seed);
            let fam = random_family(20, 3, 12, &mut rng);
            let state = WGameState::new(20, 4, Some(&fam));
            let mut painter = RecursivePainter::new(3, 20, Some(&fam));
            let mut pres = FuzzPresenter::new([1.0, 2.0, 1.0], 60);
            let (_, s) = play_wgame(state, &mut pres, &mut painter, &mut rng, &Default::default()).unwrap();
            s.log().to_vec()
        };
        assert_eq!(run(7), run(7));
    }

    #[test]
    fn random_family_respects_depth() {
        let mut rng = GameRng::seed_from_u64(3);
        for w in 1..=4 {
            for _ in 0..20 {
                let f = random_family(30, w, 25, &mut rng);
                assert!(f.nested_depth() < w.max(1) || f.is_empty());
            }
        }
    }

    #[test]
    fn one_color_painter_loses_to_script() {
        // Painter's only possible reply to the presentation is empty.
        let fam = NestedIntervalFamily::new(3, [Interval::new(1, 1)]);
        let state = WGameState::new(3, 1, Some(&fam));
        let mut painter = RecursivePainter::new(1, 3, None);
        let mut pres = ScriptedPresenter::new(necessity_script(1));
        let mut rng = GameRng::seed_from_u64(0);
        let (winner, _) = play_wgame(state, &mut pres, &mut painter, &mut rng, &Default::default()).unwrap();
        assert_eq!(winner, WWinner::Presenter);
    }

    #[test]
    fn painter_survives_fuzz_small() {
        let mut rng = GameRng::seed_from_u64(11);
        for w in 1..=4 {
            for g in 0..60 {
                let m = rng.gen_range(1..=20);
                let fam = random_family(m, w, rng.gen_range(0..20), &mut rng);
                let palette = 1u32 << (w - 1);
                let state = WGameState::new(m, palette, Some(&fam));
                let mut painter = RecursivePainter::new(w, m, Some(&fam));
                let mut pres = FuzzPresenter::new([1.0, 3.0, 1.0], 4 * m);
                let opts = WGameOptions {
                    audit: true,
                    ..Default::default()
                };
                match play_wgame(state, &mut pres, &mut painter, &mut rng, &opts) {
                    Ok((winner, _)) => assert_eq!(winner, WWinner::Painter, "w={w} game {g}"),
                    Err(f) => {
                        let rep = WGameReproducer::from_failure(w, &fam, &f);
                        panic!("w={w} game {g}: {}\n{}", f.error, serde_json::to_string(&rep).unwrap());
                    }
                }
            }
        }
    }
}
