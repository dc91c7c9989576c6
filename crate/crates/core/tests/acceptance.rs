//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use quadgait::sim::simulate;
use quadgait::sim::{run_case_study, CaseStudy, Scenario, SimTrace};
use quadgait::spin::{
    body_rotation_support, body_rotation_swing, closed_form_geometry, cycle_intervals, plan_spin,
    plan_spin_cycle, spin_geometry, SpinDirection,
};
use quadgait::swing::{solve_ts, swing_x, SwingSpec};
use quadgait::terrain::StairProfile;
use quadgait::terrain::Terrain;
use quadgait::timeline::{Phase, Timeline};
use quadgait::transition::{
    candidate_targets, plan_spin_transition, plan_wave_transition, search_transition, step_margin,
    Move, TransitionPlan,
};
use quadgait::wave::{plan_level_walk, plan_stair_ascent, plan_stair_descent, GaitParams};
use quadgait::{FootholdConfig, Leg, RobotModel, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MARGIN_FLOOR: f64 = -1e-9;
const TRANSITION_ONLY_BELOW: f64 = 1e-6;
const RUNTIME_LIMIT_S: f64 = 30.0;
const POSE_TOL: f64 = 1e-6;
const ENDPOINT_TOL: f64 = 1e-9;
const FD_REL_TOL: f64 = 1e-5;
const TS_INVERSE_TOL: f64 = 1e-10;
const CONTACT_TOL: f64 = 1e-9;
const FOOTPRINT_TOL: f64 = 1e-6;
const ORACLE_TOL: f64 = 1e-9;
const ORACLE_SAMPLES: usize = 1_000_000;
const SPIN_REF_PHI: f64 = 0.61789;
/// The quoted reference arc is given to five digits and sits 3.4e-4 from
/// the exact intersection; the exact check against the oracle is ORACLE_TOL.
const SPIN_REF_TOL: f64 = 5e-4;
const SCHEDULE_TOL: f64 = 1e-12;
const GOAL_TOL: f64 = 1e-9;
const PERIOD_TOL: f64 = 1e-9;
const FLIGHT_CYCLES: usize = 8;

fn long_flights(params: &GaitParams) -> (StairProfile, StairProfile) {
    let (n, w, h) = (2 * FLIGHT_CYCLES, params.stair_width, params.stair_height);
    (
        StairProfile::ascending(Vector2::zeros(), 0.0, n, w, h),
        StairProfile::descending(Vector2::zeros(), 0.0, n, w, h, n as f64 * h),
    )
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn bits_equal(a: &SimTrace, b: &SimTrace) -> bool {
    a.samples.len() == b.samples.len()
        && a.samples.iter().zip(&b.samples).all(|(x, y)| {
            let mut same = x.t.to_bits() == y.t.to_bits()
                && x.margin.to_bits() == y.margin.to_bits()
                && x.state.body.yaw.to_bits() == y.state.body.yaw.to_bits();
            for i in 0..3 {
                same &= x.state.body.position[i].to_bits() == y.state.body.position[i].to_bits();
            }
            for leg in Leg::ALL {
                let (p, q) = (x.state.foot(leg), y.state.foot(leg));
                same &= p.support == q.support;
                for i in 0..3 {
                    same &= p.position[i].to_bits() == q.position[i].to_bits();
                }
            }
            same
        })
        && a.events == b.events
}

fn criterion_1(cs: &CaseStudy, elapsed: f64) -> Verdict {
    let min = cs.trace.min_margin();
    let mut low_outside = 0;
    let mut min_outside = f64::INFINITY;
    for s in &cs.trace.samples {
        if !s.phase.is_transition() {
            min_outside = min_outside.min(s.margin);
            if s.margin < TRANSITION_ONLY_BELOW {
                low_outside += 1;
            }
        }
    }
    verdict(
        min >= MARGIN_FLOOR && low_outside == 0 && elapsed < RUNTIME_LIMIT_S,
        format!(
            "min margin {min:.3e} m, min outside transitions {min_outside:.3e} m, {low_outside} low samples outside transitions, {} samples in {elapsed:.2} s",
            cs.trace.samples.len()
        ),
    )
}

fn criterion_2(cs: &CaseStudy, params: &GaitParams) -> Verdict {
    let spin = cs.stage("spin").expect("spin stage");
    let yaw_after_spin = cs.timeline.state_at(spin.t_end).unwrap().body.yaw;
    let final_yaw = cs.timeline.final_state().body.yaw;
    let ascent = cs.stage("ascent").expect("ascent stage");
    let descent = cs.stage("descent").expect("descent stage");
    let z_before = cs
        .timeline
        .state_at(ascent.t_start)
        .unwrap()
        .body
        .position
        .z;
    let z_after = cs.timeline.state_at(descent.t_end).unwrap().body.position.z;
    let mut worst_rise = 0.0f64;
    for w in cs.ascent_cycle_times.windows(2) {
        let z0 = cs.timeline.state_at(w[0]).unwrap().body.position.z;
        let z1 = cs.timeline.state_at(w[1]).unwrap().body.position.z;
        worst_rise = worst_rise.max((z1 - z0 - 2.0 * params.stair_height).abs());
    }
    let yaw_err = (yaw_after_spin - FRAC_PI_2)
        .abs()
        .max((final_yaw - FRAC_PI_2).abs());
    let z_err = (z_after - z_before).abs();
    verdict(
        yaw_err <= POSE_TOL && z_err <= POSE_TOL && worst_rise <= POSE_TOL && cs.ascent_cycle_times.len() >= 2,
        format!(
            "yaw error {yaw_err:.1e} rad, descent z error {z_err:.1e} m, per-cycle rise error {worst_rise:.1e} m over {} cycles",
            cs.ascent_cycle_times.len() - 1
        ),
    )
}

fn swing_specs(rng: &mut ChaCha8Rng) -> Vec<SwingSpec> {
    let mut specs = vec![
        SwingSpec::flat(1.0, 0.0, 2.0, 0.02),
        SwingSpec {
            x_f: 1.0,
            y_f: 0.0,
            z_f: 0.26,
            t_sw: 2.0,
            h_s: 0.26,
            d_s: 0.6,
            delta_h: 0.02,
        },
        SwingSpec {
            x_f: 1.0,
            y_f: 0.0,
            z_f: -0.26,
            t_sw: 2.0,
            h_s: 0.0,
            d_s: 0.85,
            delta_h: 0.02,
        },
    ];
    for _ in 0..20 {
        let x_f = rng.gen_range(0.1..1.5);
        let z_f = rng.gen_range(-0.3..0.3);
        specs.push(SwingSpec {
            x_f,
            y_f: rng.gen_range(-0.2..0.2),
            z_f,
            t_sw: rng.gen_range(0.5..4.0),
            h_s: z_f.max(0.0) + rng.gen_range(0.0..0.1),
            d_s: rng.gen_range(0.05..0.95) * x_f,
            delta_h: rng.gen_range(0.005..0.05),
        });
    }
    specs
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Verdict {
    let mut end_pos = 0.0f64;
    let mut end_deriv = 0.0f64;
    let mut fd_rel = 0.0f64;
    let mut apex_err = 0.0f64;
    for spec in swing_specs(rng) {
        let t_s = solve_ts(&spec).unwrap();
        let a = spec.sample(0.0, t_s).unwrap();
        let b = spec.sample(spec.t_sw, t_s).unwrap();
        end_pos = end_pos
            .max(a.position.norm())
            .max((b.position - Vector3::new(spec.x_f, spec.y_f, spec.z_f)).norm());
        end_deriv = end_deriv
            .max(a.velocity.norm())
            .max(b.velocity.norm())
            .max(a.acceleration.norm())
            .max(b.acceleration.norm());
        apex_err = apex_err
            .max((spec.sample(t_s, t_s).unwrap().position.z - (spec.h_s + spec.delta_h)).abs());

        let n = 400;
        let h = spec.t_sw * 1e-6;
        let samples: Vec<_> = (1..n)
            .map(|k| spec.t_sw * k as f64 / n as f64)
            .filter(|t| (t - t_s).abs() > 2.0 * h)
            .collect();
        let (mut vmax, mut amax) = (0.0f64, 0.0f64);
        for &t in &samples {
            let s = spec.sample(t, t_s).unwrap();
            vmax = vmax.max(s.velocity.norm());
            amax = amax.max(s.acceleration.norm());
        }
        for &t in &samples {
            let s = spec.sample(t, t_s).unwrap();
            let p = spec.sample(t + h, t_s).unwrap();
            let m = spec.sample(t - h, t_s).unwrap();
            let v_fd = (p.position - m.position) / (2.0 * h);
            let a_fd = (p.velocity - m.velocity) / (2.0 * h);
            fd_rel = fd_rel
                .max((v_fd - s.velocity).norm() / vmax)
                .max((a_fd - s.acceleration).norm() / amax);
        }
    }
    let mut inverse = 0.0f64;
    for _ in 0..100 {
        let x_f = rng.gen_range(0.1..2.0);
        let d = rng.gen_range(0.0..x_f);
        let spec = SwingSpec {
            x_f,
            y_f: 0.0,
            z_f: 0.0,
            t_sw: rng.gen_range(0.5..4.0),
            h_s: 0.1,
            d_s: d,
            delta_h: 0.02,
        };
        let t_s = solve_ts(&spec).unwrap();
        inverse = inverse.max((swing_x(t_s, &spec).unwrap() - d).abs());
    }
    verdict(
        end_pos <= ENDPOINT_TOL
            && end_deriv <= ENDPOINT_TOL
            && fd_rel <= FD_REL_TOL
            && apex_err <= ENDPOINT_TOL
            && inverse <= TS_INVERSE_TOL,
        format!(
            "endpoint position {end_pos:.1e} m, endpoint vel/acc {end_deriv:.1e}, finite-difference rel {fd_rel:.1e}, apex {apex_err:.1e} m, solve_ts inverse {inverse:.1e} m"
        ),
    )
}

fn criterion_4(cs: &CaseStudy) -> Verdict {
    let dt = 1e-3;
    let mut swings = 0;
    let mut stair_swings = 0;
    let mut min_interior = f64::INFINITY;
    let mut worst_end = 0.0f64;
    let mut state = cs.timeline.initial;
    for seg in &cs.timeline.segments {
        if let Some(rec) = &seg.swing {
            swings += 1;
            let leg = rec.leg;
            let lift = rec.liftoff.z;
            let n = ((seg.t_end - seg.t_start) / dt).ceil() as usize;
            let mut touched_stairs = false;
            for k in 0..=n {
                let t = (seg.t_start + k as f64 * dt).min(seg.t_end);
                let foot = seg.state_at(&state, t).unwrap().foot(leg).position;
                let ground = cs.terrain.height_at(&foot.xy());
                touched_stairs |= (ground - lift).abs() > 1e-12;
                let gap = foot.z - ground;
                if k == 0 || k == n {
                    worst_end = worst_end.max(gap.abs());
                } else {
                    min_interior = min_interior.min(gap);
                }
            }
            if touched_stairs {
                stair_swings += 1;
            }
        }
        state = seg.end_state(&state);
    }
    verdict(
        min_interior > 0.0 && worst_end <= CONTACT_TOL && stair_swings > 0,
        format!(
            "{swings} swings ({stair_swings} over risers), min interior clearance {min_interior:.1e} m, liftoff/touchdown gap {worst_end:.1e} m"
        ),
    )
}

struct Footstep {
    phase: Phase,
    heading: Vector2<f64>,
    from: Vector3<f64>,
    to: Vector3<f64>,
}

fn footsteps(trace: &SimTrace) -> Vec<Footstep> {
    let s = &trace.samples;
    let mut out = Vec::new();
    for leg in Leg::ALL {
        let mut lift: Option<(usize, Vector3<f64>)> = None;
        for i in 1..s.len() {
            let (a, b) = (s[i - 1].state.foot(leg), s[i].state.foot(leg));
            if a.support && !b.support {
                lift = Some((i, a.position));
            }
            if !a.support && b.support {
                let (j, from) = lift.take().expect("touchdown after liftoff");
                let mid = &s[(i + j) / 2];
                out.push(Footstep {
                    phase: mid.phase,
                    heading: mid.state.body.heading(),
                    from,
                    to: b.position,
                });
            }
        }
    }
    out
}

fn criterion_5(cs: &CaseStudy, params: &GaitParams) -> Verdict {
    let lambda = params.stroke / params.beta;
    let (w, h) = (params.stair_width, params.stair_height);
    let mut walk_steps = 0;
    let mut spacing_err = 0.0f64;
    let mut stair_steps = 0;
    let mut stair_err = 0.0f64;
    let model = RobotModel::reference();
    let (up, down) = long_flights(params);
    let mut runs = vec![(cs.trace.clone(), vec![cs.ascent, cs.descent])];
    for flight in [up, down] {
        let tl = if flight.ascending {
            plan_stair_ascent(&model, params, &flight, FLIGHT_CYCLES)
        } else {
            plan_stair_descent(&model, params, &flight, FLIGHT_CYCLES)
        }
        .unwrap();
        runs.push((
            simulate(&tl, &model, &Terrain::single(flight), 1e-3).unwrap(),
            vec![flight],
        ));
    }
    for (trace, flights) in &runs {
        for f in footsteps(trace) {
            if !matches!(f.phase, Phase::Walk | Phase::Ascent | Phase::Descent) {
                continue;
            }
            let d = f.to - f.from;
            let along = d.xy().dot(&f.heading);
            let across = d.x * -f.heading.y + d.y * f.heading.x;
            walk_steps += 1;
            spacing_err = spacing_err.max((along - lambda).abs()).max(across.abs());
            for flight in flights {
                let end = flight.base_height + flight.rise();
                let (lo, hi) = (flight.base_height.min(end), flight.base_height.max(end));
                let on_treads = |z: f64| z > lo + 1e-9 && z < hi - 1e-9;
                let on_flight = |p: &Vector3<f64>| (flight.height_at(&p.xy()) - p.z).abs() < 1e-9;
                if on_treads(f.from.z)
                    && on_treads(f.to.z)
                    && on_flight(&f.from)
                    && on_flight(&f.to)
                {
                    let dir = flight.direction();
                    let u = d.xy().dot(&dir);
                    let v = d.x * -dir.y + d.y * dir.x;
                    let dz = if flight.ascending { 2.0 * h } else { -2.0 * h };
                    stair_steps += 1;
                    stair_err = stair_err
                        .max((u - 2.0 * w).abs())
                        .max(v.abs())
                        .max((d.z - dz).abs());
                }
            }
        }
    }
    verdict(
        spacing_err <= FOOTPRINT_TOL && stair_err <= FOOTPRINT_TOL && walk_steps > 0 && stair_steps >= 8,
        format!(
            "lambda {lambda}: {walk_steps} gait steps, spacing error {spacing_err:.1e} m; {stair_steps} tread-to-tread steps, (2W, 0, ±2H) error {stair_err:.1e} m"
        ),
    )
}

/// Arc of the circle of radius `rho` about the origin inside the rectangle
/// `[x0, x1] × [y0, y1]` that contains polar angle `theta_c`, located by
/// dense angular stepping and refined by bisection.
fn oracle_arc(rho: f64, x0: f64, x1: f64, y0: f64, y1: f64, theta_c: f64) -> (f64, f64) {
    let inside = |a: f64| {
        let (x, y) = (rho * a.cos(), rho * a.sin());
        x >= x0 && x <= x1 && y >= y0 && y <= y1
    };
    let step = PI / ORACLE_SAMPLES as f64;
    let edge = |sign: f64| {
        let mut k = 0;
        while inside(theta_c + sign * (k + 1) as f64 * step) {
            k += 1;
            assert!(k < ORACLE_SAMPLES, "arc does not leave the rectangle");
        }
        let (mut a, mut b) = (k as f64 * step, (k + 1) as f64 * step);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if inside(theta_c + sign * m) {
                a = m;
            } else {
                b = m;
            }
        }
        theta_c + sign * a
    };
    (edge(-1.0), edge(1.0))
}

fn lengths_case(m: &RobotModel) -> bool {
    let rho = m.p_x.hypot(m.p_y) / 2.0;
    let (x0, x1) = ((m.p_x - m.r_x) / 2.0, (m.p_x + m.r_x) / 2.0);
    [(m.p_y - m.r_y) / 2.0, (m.p_y + m.r_y) / 2.0]
        .iter()
        .all(|&y| {
            y < rho && {
                let x = (rho * rho - y * y).sqrt();
                x >= x0 && x <= x1
            }
        })
}

fn oracle_geometry(m: &RobotModel) -> (f64, f64, f64, f64, f64) {
    let rho = m.p_x.hypot(m.p_y) / 2.0;
    let (lo, hi) = oracle_arc(
        rho,
        (m.p_x - m.r_x) / 2.0,
        (m.p_x + m.r_x) / 2.0,
        (m.p_y - m.r_y) / 2.0,
        (m.p_y + m.r_y) / 2.0,
        m.p_y.atan2(m.p_x),
    );
    let s_x = rho * (hi.cos() - lo.cos());
    let s_y = rho * (hi.sin() - lo.sin());
    (lo, FRAC_PI_2 - hi, hi - lo, s_x, s_y)
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Verdict {
    let mut models = 0;
    let mut worst = 0.0f64;
    let mut missing = 0;
    while models < 100 {
        let p_x = rng.gen_range(0.5..1.5);
        let p_y = rng.gen_range(0.2..1.0);
        let m = RobotModel {
            p_x,
            p_y,
            r_x: rng.gen_range(0.1..1.0) * p_x,
            r_y: rng.gen_range(0.05..1.0) * p_y,
            r_z: 0.5,
            body_height: 0.5,
        };
        if !lengths_case(&m) {
            continue;
        }
        models += 1;
        let Some(g) = closed_form_geometry(&m) else {
            missing += 1;
            continue;
        };
        let (d, gm, phi, s_x, s_y) = oracle_geometry(&m);
        for e in [
            g.delta - d,
            g.gamma - gm,
            g.phi - phi,
            g.s_x - s_x,
            g.s_y - s_y,
        ] {
            worst = worst.max(e.abs());
        }
        worst = worst.max((g.s_y - m.r_y).abs());
    }
    let ex = RobotModel {
        p_x: 1.0,
        p_y: 0.5,
        r_x: 0.9,
        r_y: 0.3,
        r_z: 0.5,
        body_height: 0.5,
    };
    let g = spin_geometry(&ex).unwrap();
    let (_, _, phi, _, _) = oracle_geometry(&ex);
    let ref_err = (g.phi - SPIN_REF_PHI).abs();
    let sy_err = (g.s_y - ex.r_y).abs();
    verdict(
        missing == 0
            && worst <= ORACLE_TOL
            && g.closed_form
            && (g.phi - phi).abs() <= ORACLE_TOL
            && ref_err <= SPIN_REF_TOL
            && sy_err <= SCHEDULE_TOL,
        format!(
            "{models} models, closed form vs oracle {worst:.1e}; example phi {:.6} rad (reference {SPIN_REF_PHI}, off by {ref_err:.1e}; oracle {phi:.6}), s_y - R_y {sy_err:.1e} m",
            g.phi
        ),
    )
}

fn criterion_7() -> Verdict {
    let model = RobotModel::reference();
    let mut worst_sum = 0.0f64;
    let mut worst_dur = 0.0f64;
    let mut worst_rate = 0.0f64;
    let mut zero_support_ok = true;
    for beta in [0.75, 0.8, 0.875, 0.95] {
        let params = GaitParams {
            beta,
            ..GaitParams::reference()
        };
        let phi = spin_geometry(&model).unwrap().phi;
        let sw = body_rotation_swing(&params, phi);
        let sup = body_rotation_support(&params, phi);
        worst_sum = worst_sum.max((4.0 * sw + 2.0 * sup - phi / beta).abs());
        let iv = cycle_intervals(&params);
        worst_dur = worst_dur.max((iv.iter().sum::<f64>() - params.cycle_time).abs());
        let rate = phi / (beta * params.cycle_time);
        let tl = plan_spin_cycle(&model, &params, SpinDirection::Ccw).unwrap();
        let total: f64 = tl.segments.iter().map(|s| s.duration()).sum();
        worst_dur = worst_dur.max((total - params.cycle_time).abs());
        for seg in &tl.segments {
            let d = seg.duration();
            if d > 0.0 {
                worst_rate = worst_rate.max((seg.motion.rotation / d - rate).abs());
            } else if seg.motion.rotation != 0.0 {
                worst_rate = f64::INFINITY;
            }
        }
        if beta == 0.75 {
            zero_support_ok = sup == 0.0
                && iv[1] == 0.0
                && iv[4] == 0.0
                && tl
                    .segments
                    .iter()
                    .filter(|s| s.swing.is_none() && s.duration() == 0.0)
                    .count()
                    == 2;
        }
    }
    verdict(
        worst_sum <= SCHEDULE_TOL && worst_dur <= SCHEDULE_TOL && worst_rate <= SCHEDULE_TOL && zero_support_ok,
        format!(
            "rotation sum {worst_sum:.1e} rad, duration sum {worst_dur:.1e} s, yaw-rate spread {worst_rate:.1e} rad/s, beta = 3/4 zero support intervals: {zero_support_ok}"
        ),
    )
}

fn margin_and_goal(plan: &TransitionPlan) -> (f64, f64) {
    let worst = plan
        .step_margins()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    (worst, plan.final_config().max_distance(&plan.goal))
}

fn lex_key(moves: &[Move]) -> Vec<f64> {
    let mut k: Vec<f64> = moves.iter().map(|m| m.leg.id() as f64).collect();
    for m in moves {
        k.extend(m.target.iter());
    }
    k
}

fn better(worst: f64, moves: &[Move], best: &Option<(f64, Vec<Move>)>) -> bool {
    match best {
        None => true,
        Some((b, bm)) => {
            worst > *b
                || (worst == *b
                    && lex_key(moves)
                        .iter()
                        .zip(&lex_key(bm))
                        .map(|(p, q)| p.total_cmp(q))
                        .find(|o| o.is_ne())
                        == Some(std::cmp::Ordering::Less))
        }
    }
}

fn extend(
    options: &[Move],
    config: FootholdConfig,
    worst: f64,
    goal: &FootholdConfig,
    left: usize,
    path: &mut Vec<Move>,
    best: &mut Option<(f64, Vec<Move>)>,
) {
    if left == 0 {
        if config.max_distance(goal) <= 1e-12 && better(worst, path, best) {
            *best = Some((worst, path.clone()));
        }
        return;
    }
    for m in options {
        // A no-op or unstable move invalidates every sequence containing it.
        let s = step_margin(&config, m.leg);
        if (config.get(m.leg) - m.target).norm() <= 1e-12 || s < 0.0 {
            continue;
        }
        let mut next = config;
        next.set(m.leg, m.target);
        path.push(*m);
        extend(options, next, worst.min(s), goal, left - 1, path, best);
        path.pop();
    }
}

/// Exhaustive search: every sequence of up to `max_moves` moves over the
/// candidate footholds, keeping the shortest stable ones, then the largest
/// worst-case margin, then the smallest leg order and targets.
fn enumerate(
    model: &RobotModel,
    start: &FootholdConfig,
    goal: &FootholdConfig,
    max_moves: usize,
) -> Option<(f64, Vec<Move>)> {
    let options: Vec<Move> = Leg::ALL
        .iter()
        .flat_map(|&l| {
            candidate_targets(model, start, goal, l)
                .into_iter()
                .map(move |t| Move { leg: l, target: t })
        })
        .collect();
    for depth in 0..=max_moves {
        let mut best = None;
        extend(
            &options,
            *start,
            f64::INFINITY,
            goal,
            depth,
            &mut Vec::new(),
            &mut best,
        );
        if best.is_some() {
            return best;
        }
    }
    None
}

fn random_config(rng: &mut ChaCha8Rng, model: &RobotModel) -> FootholdConfig {
    FootholdConfig::from_fn(|leg| {
        let ws = model.workspace(leg);
        let (lo, hi) = (ws.min(), ws.max());
        Vector3::new(
            rng.gen_range(lo.x..hi.x),
            rng.gen_range(lo.y..hi.y),
            -model.body_height,
        )
    })
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Verdict {
    let model = RobotModel::reference();
    let params = GaitParams::reference();
    let wave = plan_wave_transition(&model, &params).unwrap();
    let order_ok = wave.legs() == vec![2, 3, 4, 1, 3];
    let mut plans = vec![wave];
    for dir in [SpinDirection::Ccw, SpinDirection::Cw] {
        plans.push(plan_spin_transition(&model, &params, dir).unwrap());
    }
    let mut worst_margin = f64::INFINITY;
    let mut worst_goal = 0.0f64;
    for p in &plans {
        let (m, g) = margin_and_goal(p);
        worst_margin = worst_margin.min(m);
        worst_goal = worst_goal.max(g);
    }
    let max_moves = 3;
    let mut matched = 0;
    let mut solvable = 0;
    for _ in 0..20 {
        let start = random_config(rng, &model);
        let mut goal = start;
        let changed = rng.gen_range(1..=3);
        for _ in 0..changed {
            let leg = Leg::ALL[rng.gen_range(0..4)];
            goal.set(leg, *random_config(rng, &model).get(leg));
        }
        let searched = search_transition(&model, &start, &goal, max_moves).ok();
        let oracle = enumerate(&model, &start, &goal, max_moves);
        let same = match (&searched, &oracle) {
            (None, None) => true,
            (Some(p), Some((w, moves))) => {
                solvable += 1;
                let sw = p.step_margins().into_iter().fold(f64::INFINITY, f64::min);
                p.moves == *moves && sw == *w
            }
            _ => false,
        };
        if same {
            matched += 1;
        }
    }
    verdict(
        order_ok && worst_margin >= 0.0 && worst_goal <= GOAL_TOL && matched == 20 && solvable > 0,
        format!(
            "wave order {:?}, {} plans min step margin {worst_margin:.3e} m, goal error {worst_goal:.1e} m; search = enumeration on {matched}/20 ({solvable} solvable within {max_moves} moves)",
            plans[0].legs(),
            plans.len()
        ),
    )
}

/// Largest change of any body-frame foot position between the starts of
/// cycles `first..=last` and cycle `first`.
fn body_frame_drift(tl: &Timeline, period: f64, first: usize, last: usize) -> f64 {
    let reference = tl.state_at(tl.t_start + first as f64 * period).unwrap();
    let mut worst = 0.0f64;
    for k in first + 1..=last {
        let s = tl.state_at(tl.t_start + k as f64 * period).unwrap();
        for leg in Leg::ALL {
            worst = worst.max((s.foot_body(leg) - reference.foot_body(leg)).norm());
        }
    }
    worst
}

fn criterion_9(cs: &CaseStudy, model: &RobotModel, params: &GaitParams) -> Verdict {
    let t = params.cycle_time;
    let walk = plan_level_walk(model, params, 4).unwrap();
    let (up, down) = long_flights(params);
    let climb = plan_stair_ascent(model, params, &up, FLIGHT_CYCLES).unwrap();
    let descend = plan_stair_descent(model, params, &down, FLIGHT_CYCLES).unwrap();
    let spin = plan_spin(model, params, 2.0 * PI, SpinDirection::Ccw).unwrap();
    let spin_cycles = (spin.duration() / t).round() as usize;
    // Stair gaits are periodic once every foot is on the flight, from the
    // second cycle until the front feet reach the top.
    let period = body_frame_drift(&walk, t, 0, 4)
        .max(body_frame_drift(&climb, t, 1, FLIGHT_CYCLES - 1))
        .max(body_frame_drift(&descend, t, 1, FLIGHT_CYCLES - 1))
        .max(body_frame_drift(&spin, t, 0, spin_cycles));

    let s = &cs.trace.samples;
    let mut slip = 0.0f64;
    let mut min_support = 4;
    for w in s.windows(2) {
        for leg in Leg::ALL {
            let (a, b) = (w[0].state.foot(leg), w[1].state.foot(leg));
            if a.support && b.support {
                slip = slip.max((a.position - b.position).norm());
            }
        }
    }
    for x in s {
        min_support = min_support.min(x.state.support_count());
    }
    let again = run_case_study(model, params, &Scenario::default()).unwrap();
    let deterministic = bits_equal(&cs.trace, &again.trace);
    verdict(
        period <= PERIOD_TOL && slip <= CONTACT_TOL && min_support >= 3 && deterministic,
        format!(
            "cycle drift {period:.1e} m over walk, climb, descent and {spin_cycles} spin cycles, support slip {slip:.1e} m, min supporting feet {min_support}, bit-identical rerun: {deterministic}"
        ),
    )
}

fn main() {
    let model = RobotModel::reference();
    let params = GaitParams::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(20260418);

    let clock = Instant::now();
    let cs = run_case_study(&model, &params, &Scenario::default()).expect("case study plans");
    let elapsed = clock.elapsed().as_secs_f64();

    let results = [
        ("case-study stability", criterion_1(&cs, elapsed)),
        ("case-study kinematics", criterion_2(&cs, &params)),
        ("swing trajectory contracts", criterion_3(&mut rng)),
        ("stair clearance", criterion_4(&cs)),
        ("footprint geometry", criterion_5(&cs, &params)),
        ("spin geometry oracle", criterion_6(&mut rng)),
        ("spin schedule identities", criterion_7()),
        ("transition plans", criterion_8(&mut rng)),
        ("property suites", criterion_9(&cs, &model, &params)),
    ];
    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!(
            "criterion {} {name}: {} ({})",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        if !v.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
