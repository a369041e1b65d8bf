use reactive_chain::chain::{build_chain, Chain};
use reactive_chain::executive::{Disturbances, ExecConfig, Mode, Outcome, Status, TickRecord, Trial};
use reactive_chain::kitchen;
use reactive_chain::perception::Pipeline;
use reactive_chain::planner::{plan, GroundedDomain, SearchOptions};
use reactive_chain::rng::{stream, Stream};
use reactive_chain::sim::{
    Destination, Disturbance, DisturbanceKind, InitialConfig, Kitchen, PrimitiveTable, PrimitivesConfig, Trigger,
    WorldState,
};

fn setup() -> (GroundedDomain, Chain, WorldState) {
    let (_, p, g) = kitchen::grounded();
    let init = g.init_state(&p).unwrap();
    let goal = g.goal(&p).unwrap();
    let found = plan(&g, &init, &goal, SearchOptions::optimal()).unwrap();
    let chain = build_chain(&g, found.steps(), &goal).unwrap();
    let k = Kitchen::sampled(
        &g,
        PrimitiveTable::default(),
        &InitialConfig::nominal(),
        &mut stream(0, Stream::Sim),
    )
    .unwrap();
    (g, chain, k.world)
}

fn run(
    g: &GroundedDomain,
    chain: &Chain,
    world: WorldState,
    disturbances: &[Disturbance],
    cfg: ExecConfig,
    success: f64,
) -> (Outcome, Vec<TickRecord>) {
    let table = PrimitiveTable::configured(&PrimitivesConfig {
        default_success: Some(success),
        ..Default::default()
    })
    .unwrap();
    let mut trial = Trial {
        g,
        chain,
        sim: Kitchen::new(g, table, InitialConfig::default().counter_zones, world).unwrap(),
        perception: Pipeline::oracle(stream(0, Stream::Perception)),
        disturbances: Disturbances::new(disturbances),
        prim_rng: stream(0, Stream::Primitives),
        sim_rng: stream(0, Stream::Sim),
    };
    let mut records = Vec::new();
    let mut sink = |r: TickRecord| records.push(r);
    let out = trial.run(&cfg, Some(&mut sink)).unwrap();
    (out, records)
}

fn teleport_during_cage() -> Vec<Disturbance> {
    vec![Disturbance {
        trigger: Trigger::WhenOperator("cage_obj(spam)".into()),
        kind: DisturbanceKind::TeleportObject {
            object: "spam".into(),
            destination: Destination::CounterRandom,
        },
    }]
}

#[test]
fn nominal_run_follows_the_chain() {
    let (g, chain, world) = setup();
    let (out, records) = run(&g, &chain, world, &[], ExecConfig::default(), 1.0);
    assert_eq!(out.status, Status::Succeeded);
    assert_eq!(out.recoveries, 0);
    assert!(!out.false_success);
    let steps: Vec<usize> = out.history.iter().map(|h| h.step).collect();
    assert_eq!(steps, (0..chain.len()).collect::<Vec<_>>());
    assert_eq!(records.len() as u32, out.ticks);
    // the last three ticks confirm the goal
    assert!(records.iter().rev().take(3).all(|r| r.reason == "goal_holding"));
}

#[test]
fn tick_budget() {
    let (g, chain, world) = setup();
    let cfg = ExecConfig {
        max_ticks: 1,
        ..Default::default()
    };
    let (out, _) = run(&g, &chain, world, &[], cfg, 1.0);
    assert_eq!(out.status, Status::BudgetExhausted);
    assert_eq!(out.ticks, 1);
}

#[test]
fn reactive_recovers_from_teleport() {
    let (g, chain, world) = setup();
    let (out, records) = run(&g, &chain, world, &teleport_during_cage(), ExecConfig::default(), 1.0);
    assert_eq!(out.status, Status::Succeeded);
    assert!(out.recoveries >= 1);
    let approaches = out
        .history
        .iter()
        .filter(|h| h.operator == "approach_obj(spam)")
        .count();
    assert!(approaches >= 2, "{:?}", out.history);
    let fired: Vec<_> = records.iter().flat_map(|r| r.disturbances_fired.iter()).collect();
    assert_eq!(fired.len(), 1);
}

#[test]
fn open_loop_cannot_recover() {
    let (g, chain, world) = setup();
    let cfg = ExecConfig {
        mode: Mode::OpenLoop,
        ..Default::default()
    };
    let (out, _) = run(&g, &chain, world.clone(), &teleport_during_cage(), cfg, 1.0);
    assert_eq!(out.status, Status::Stuck);
    assert_eq!(out.history.len(), chain.len());
    let (out, _) = run(&g, &chain, world, &[], cfg, 1.0);
    assert_eq!(out.status, Status::Succeeded);
}

#[test]
fn retries_failed_primitives() {
    let (g, chain, world) = setup();
    let (out, _) = run(&g, &chain, world, &[], ExecConfig::default(), 0.7);
    assert_eq!(out.status, Status::Succeeded);
}

#[test]
fn stuck_when_no_step_applies() {
    let (g, chain, mut world) = setup();
    // a closed, empty gripper: nothing in the chain reopens it
    world.gripper_aperture = 0.0;
    let (out, records) = run(&g, &chain, world, &[], ExecConfig::default(), 1.0);
    assert_eq!(out.status, Status::Stuck);
    assert_eq!(out.ticks, ExecConfig::default().stuck_ticks);
    assert!(records
        .iter()
        .all(|r| r.reason == "none_enterable" && r.selected_operator.is_none()));
}
