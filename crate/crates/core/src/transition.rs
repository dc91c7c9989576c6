//! Stationary-body foot relocation between configurations.
//!
//! A move lifts one leg, carries it to a new body-frame target and puts it
//! down. While it is in the air the CoM must stay inside or on the triangle
//! of the other three feet.

use std::cmp::Ordering;

use nalgebra::{Vector2, Vector3};

use crate::error::{GaitError, Result};
use crate::model::{FootholdConfig, Leg, RobotModel, RobotState, WORKSPACE_TOL};
use crate::spin::{desired_spin_config, SpinDirection};
use crate::stability::{convex_hull, stability_margin};
use crate::swing::SwingSpec;
use crate::timeline::{BodyMotion, Phase, SwingFrame, SwingRecord, Timeline};
use crate::wave::{desired_wave_config, GaitParams};

/// Positions closer than this (m) are the same foothold.
const SAME_POINT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub leg: Leg,
    /// Body-frame target.
    pub target: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionPlan {
    pub start: FootholdConfig,
    pub goal: FootholdConfig,
    pub moves: Vec<Move>,
}

impl TransitionPlan {
    pub fn legs(&self) -> Vec<u8> {
        self.moves.iter().map(|m| m.leg.id()).collect()
    }

    /// Configuration after all moves.
    pub fn final_config(&self) -> FootholdConfig {
        let mut c = self.start;
        for m in &self.moves {
            c.set(m.leg, m.target);
        }
        c
    }

    /// Margin while each move is in the air.
    pub fn step_margins(&self) -> Vec<f64> {
        let mut c = self.start;
        self.moves
            .iter()
            .map(|m| {
                let s = step_margin(&c, m.leg);
                c.set(m.leg, m.target);
                s
            })
            .collect()
    }
}

/// Margin of the body centre against the feet other than `lifted`.
pub fn step_margin(config: &FootholdConfig, lifted: Leg) -> f64 {
    let pts: Vec<Vector2<f64>> = Leg::ALL
        .iter()
        .filter(|&&l| l != lifted)
        .map(|&l| config.get(l).xy())
        .collect();
    stability_margin(&convex_hull(&pts), &Vector2::zeros())
}

/// Minimum step margin over the plan; `+∞` for an empty plan. Fails if a
/// target leaves its workspace.
pub fn verify_transition(plan: &TransitionPlan, model: &RobotModel) -> Result<f64> {
    plan.start.validate(model)?;
    for m in &plan.moves {
        let excess = model.workspace(m.leg).excess(&m.target);
        if excess > WORKSPACE_TOL {
            return Err(GaitError::InfeasibleState { leg: m.leg, excess });
        }
    }
    Ok(plan
        .step_margins()
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

fn same(a: &Vector3<f64>, b: &Vector3<f64>) -> bool {
    (a - b).norm() <= SAME_POINT
}

fn push_unique(out: &mut Vec<Vector3<f64>>, p: Vector3<f64>) {
    if !out.iter().any(|q| same(q, &p)) {
        out.push(p);
    }
}

/// Footholds the search may use for `leg`: its goal, its workspace centre,
/// every other leg's start or goal offset from its own centre replayed
/// about this leg's centre, and the corners and edge midpoints of the
/// workspace rectangle at the goal height. Only points inside the
/// workspace are kept.
pub fn candidate_targets(
    model: &RobotModel,
    start: &FootholdConfig,
    goal: &FootholdConfig,
    leg: Leg,
) -> Vec<Vector3<f64>> {
    let ws = model.workspace(leg);
    let c = ws.center;
    let mut out = Vec::new();
    push_unique(&mut out, *goal.get(leg));
    push_unique(&mut out, c);
    for cfg in [start, goal] {
        for k in Leg::ALL {
            push_unique(&mut out, c + (cfg.get(k) - model.workspace_center(k)));
        }
    }
    let h = ws.half_extents;
    let z = goal.get(leg).z;
    for (i, j) in [
        (-1, -1),
        (1, -1),
        (1, 1),
        (-1, 1),
        (0, -1),
        (1, 0),
        (0, 1),
        (-1, 0),
    ] {
        push_unique(
            &mut out,
            Vector3::new(c.x + i as f64 * h.x, c.y + j as f64 * h.y, z),
        );
    }
    out.retain(|p| ws.contains(p, WORKSPACE_TOL));
    out
}

fn cmp_moves(a: &[Move], b: &[Move]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.leg.cmp(&y.leg);
        if o != Ordering::Equal {
            return o;
        }
    }
    for (x, y) in a.iter().zip(b) {
        for i in 0..3 {
            let o = x.target[i].total_cmp(&y.target[i]);
            if o != Ordering::Equal {
                return o;
            }
        }
    }
    a.len().cmp(&b.len())
}

struct Search<'a> {
    goal: &'a FootholdConfig,
    candidates: [Vec<Vector3<f64>>; 4],
    path: Vec<Move>,
    best: Option<(f64, Vec<Move>)>,
}

impl Search<'_> {
    fn off_goal(&self, c: &FootholdConfig) -> usize {
        Leg::ALL
            .iter()
            .filter(|&&l| !same(c.get(l), self.goal.get(l)))
            .count()
    }

    fn run(&mut self, c: FootholdConfig, left: usize, worst: f64) {
        let off = self.off_goal(&c);
        if off > left {
            return;
        }
        if let Some((b, _)) = &self.best {
            if worst < *b {
                return;
            }
        }
        if left == 0 {
            let better = match &self.best {
                None => true,
                Some((b, moves)) => {
                    worst > *b || (worst == *b && cmp_moves(&self.path, moves) == Ordering::Less)
                }
            };
            if better {
                self.best = Some((worst, self.path.clone()));
            }
            return;
        }
        for leg in Leg::ALL {
            // A leg moved twice in a row could have moved once.
            if self.path.last().is_some_and(|m| m.leg == leg) {
                continue;
            }
            let s = step_margin(&c, leg);
            if s < 0.0 {
                continue;
            }
            for k in 0..self.candidates[leg.index()].len() {
                let target = self.candidates[leg.index()][k];
                if same(&target, c.get(leg)) {
                    continue;
                }
                let mut next = c;
                next.set(leg, target);
                self.path.push(Move { leg, target });
                self.run(next, left - 1, worst.min(s));
                self.path.pop();
            }
        }
    }
}

/// Fewest-move stable plan from `start` to `goal`, preferring the largest
/// worst-case step margin and then the lexicographically smallest leg order.
pub fn search_transition(
    model: &RobotModel,
    start: &FootholdConfig,
    goal: &FootholdConfig,
    max_moves: usize,
) -> Result<TransitionPlan> {
    start.validate(model)?;
    goal.validate(model)?;
    let mut search = Search {
        goal,
        candidates: Leg::ALL.map(|l| candidate_targets(model, start, goal, l)),
        path: Vec::new(),
        best: None,
    };
    for depth in 0..=max_moves {
        search.run(*start, depth, f64::INFINITY);
        if let Some((_, moves)) = search.best.take() {
            return Ok(TransitionPlan {
                start: *start,
                goal: *goal,
                moves,
            });
        }
    }
    Err(GaitError::Infeasible(format!(
        "no stable transition within {max_moves} moves"
    )))
}

/// Five-move transition from the workspace centres to the wave-gait start:
/// legs 2, 3, 4, 1, 3. Leg 3 first stops opposite leg 2's new foothold so the
/// CoM rides the 2–3 diagonal while legs 4 and 1 move.
pub fn plan_wave_transition(model: &RobotModel, params: &GaitParams) -> Result<TransitionPlan> {
    let start = model.initial_configuration();
    let goal = desired_wave_config(model, params)?;
    let rf = goal.get(Leg::RightFront);
    let lr_stop = Vector3::new(-rf.x, -rf.y, rf.z);
    let moves = vec![
        Move {
            leg: Leg::RightFront,
            target: *rf,
        },
        Move {
            leg: Leg::LeftRear,
            target: lr_stop,
        },
        Move {
            leg: Leg::RightRear,
            target: *goal.get(Leg::RightRear),
        },
        Move {
            leg: Leg::LeftFront,
            target: *goal.get(Leg::LeftFront),
        },
        Move {
            leg: Leg::LeftRear,
            target: *goal.get(Leg::LeftRear),
        },
    ];
    let plan = TransitionPlan { start, goal, moves };
    let worst = verify_transition(&plan, model)?;
    if worst < 0.0 {
        return Err(GaitError::Infeasible(format!(
            "wave transition loses stability (margin {worst:.3e} m)"
        )));
    }
    Ok(plan)
}

/// Transition from the workspace centres to the spin-gait start, found by search.
pub fn plan_spin_transition(
    model: &RobotModel,
    params: &GaitParams,
    direction: SpinDirection,
) -> Result<TransitionPlan> {
    let start = model.initial_configuration();
    let goal = desired_spin_config(model, params, direction)?;
    search_transition(model, &start, &goal, 6)
}

/// Plays `plan` from `state` with the body at rest. Each move is a flat
/// body-frame swing lasting one swing period with apex `delta_h`.
pub fn transition_timeline(
    params: &GaitParams,
    state: &RobotState,
    t_start: f64,
    plan: &TransitionPlan,
    phase: Phase,
) -> Result<Timeline> {
    let mut tl = Timeline::new(*state, t_start);
    let t_sw = params.swing_time();
    for m in &plan.moves {
        let cur = tl.final_state();
        let d = m.target - cur.foot_body(m.leg);
        if d.z.abs() > SAME_POINT {
            return Err(GaitError::Infeasible(format!(
                "transition move of leg {} changes foot height",
                m.leg
            )));
        }
        let spec = SwingSpec::flat(d.x, d.y, t_sw, params.delta_h);
        let rec = SwingRecord::new(m.leg, cur, spec, t_sw / 2.0, SwingFrame::Body);
        tl.push(t_sw, BodyMotion::still(), Some(rec), phase)?;
    }
    Ok(tl)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (RobotModel, GaitParams) {
        (RobotModel::reference(), GaitParams::reference())
    }

    #[test]
    fn five_move_wave_plan() {
        let (m, p) = setup();
        let plan = plan_wave_transition(&m, &p).unwrap();
        assert_eq!(plan.legs(), vec![2, 3, 4, 1, 3]);
        let margins = plan.step_margins();
        assert!(margins.iter().all(|&s| s >= 0.0));
        assert!(margins.iter().any(|&s| s == 0.0));
        assert!(plan.final_config().max_distance(&plan.goal) <= 1e-9);
        let lr = plan.moves[1].target;
        assert!((lr.x + 0.525).abs() < 1e-12);
    }

    #[test]
    fn empty_plan_when_at_goal() {
        let (m, _) = setup();
        let c = m.initial_configuration();
        let plan = search_transition(&m, &c, &c, 6).unwrap();
        assert!(plan.moves.is_empty());
        assert_eq!(verify_transition(&plan, &m).unwrap(), f64::INFINITY);
    }

    #[test]
    fn single_displaced_leg() {
        let (m, _) = setup();
        let start = m.initial_configuration();
        let mut goal = start;
        goal.set(
            Leg::LeftFront,
            start.get(Leg::LeftFront) + Vector3::new(0.1, 0.0, 0.0),
        );
        let plan = search_transition(&m, &start, &goal, 6).unwrap();
        assert_eq!(plan.legs(), vec![1]);
    }

    #[test]
    fn wave_search_needs_five_moves() {
        let (m, p) = setup();
        let goal = desired_wave_config(&m, &p).unwrap();
        let plan = search_transition(&m, &m.initial_configuration(), &goal, 6).unwrap();
        assert_eq!(plan.moves.len(), 5);
        assert!(verify_transition(&plan, &m).unwrap() >= 0.0);
        assert!(plan.final_config().max_distance(&goal) <= 1e-9);
    }

    #[test]
    fn leg1_first_from_centres_is_on_the_border() {
        // With all feet at the centres the body centre lies on both diagonals.
        let (m, _) = setup();
        let c = m.initial_configuration();
        let tri = [
            c.get(Leg::RightFront).xy(),
            c.get(Leg::LeftRear).xy(),
            c.get(Leg::RightRear).xy(),
        ];
        // Distance from the origin to the RF–LR line, by hand.
        let (a, b) = (tri[0], tri[1]);
        let cross = a.x * b.y - a.y * b.x;
        assert!(cross.abs() / (b - a).norm() < 1e-12);
        assert_eq!(step_margin(&c, Leg::LeftFront), 0.0);
    }

    #[test]
    fn spin_transitions_are_stable() {
        let (m, p) = setup();
        for dir in [SpinDirection::Ccw, SpinDirection::Cw] {
            let plan = plan_spin_transition(&m, &p, dir).unwrap();
            assert!(plan.moves.len() <= 5, "{:?}", plan.legs());
            assert!(verify_transition(&plan, &m).unwrap() >= 0.0);
            assert!(plan.final_config().max_distance(&plan.goal) <= 1e-9);
        }
    }

    #[test]
    fn timeline_replays_plan() {
        let (m, p) = setup();
        let plan = plan_wave_transition(&m, &p).unwrap();
        let body = crate::model::Pose::new(Vector3::new(0.0, 0.0, m.body_height), 0.0);
        let s0 = RobotState::from_config(body, &plan.start);
        let tl = transition_timeline(&p, &s0, 0.0, &plan, Phase::Transition).unwrap();
        assert_eq!(tl.segments.len(), 5);
        assert!(tl.final_state().config().max_distance(&plan.goal) <= 1e-9);
        assert_eq!(tl.final_state().body, body);
    }
}
