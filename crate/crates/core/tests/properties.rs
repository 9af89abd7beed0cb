use std::collections::HashSet;
use std::path::Path;

use multivis::colour::Colour;
use multivis::events::{FilterChain, StepPoint, Trajectory, TrajectoryFilter};
use multivis::geometry::{fixtures, Geometry, Material, MaterialState, PathElement, VisPatch};
use multivis::kernel::VisManager;
use multivis::math::Axis;
use multivis::shell::Shell;
use multivis::{Solid, Transform, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn shell() -> Shell {
    let mut vis = VisManager::new(fixtures::b1());
    vis.date_override = Some("2000-01-01".into());
    Shell::new(vis)
}

/// Node of a random placement tree, mirrored on the test side.
struct Node {
    multiplicity: usize,
    visible: bool,
    daughters_invisible: bool,
    children: Vec<Node>,
}

/// Builds a random hierarchy of nested boxes with single and replica
/// placements, returning it together with the expected tree.
fn random_geometry(seed: u64) -> (Geometry, Node) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Geometry::new();
    let m = g.add_material(Material::new("m", 1e-3, MaterialState::Solid).unwrap()).unwrap();
    let mut counter = 0;
    fn build(
        g: &mut Geometry,
        rng: &mut ChaCha8Rng,
        m: multivis::geometry::MaterialId,
        counter: &mut usize,
        half: f64,
        level: usize,
    ) -> (multivis::geometry::LogicalId, Node) {
        *counter += 1;
        let name = format!("L{counter}");
        let lv = g.add_logical(&name, Solid::new_box(&name, half, half, half).unwrap(), m).unwrap();
        let visible = rng.gen_bool(0.8);
        let daughters_invisible = rng.gen_bool(0.15);
        g.set_logical_vis(
            &name,
            0,
            &VisPatch { visible: Some(visible), daughters_invisible: Some(daughters_invisible), ..Default::default() },
        );
        let mut children = Vec::new();
        let n_children = if level >= 3 { 0 } else { rng.gen_range(0..3) };
        for c in 0..n_children {
            let (child, mut node) = build(g, rng, m, counter, half * 0.2, level + 1);
            if rng.gen_bool(0.3) {
                let count = rng.gen_range(1..4);
                g.place_replica(lv, format!("R{counter}_{c}"), child, Axis::X, count, half * 0.4).unwrap();
                node.multiplicity = count;
            } else {
                let x = if c == 0 { -0.5 * half } else { 0.5 * half };
                g.place(lv, format!("P{counter}_{c}"), child, Transform::translation(Vec3::new(x, 0.0, 0.0)), c)
                    .unwrap();
            }
            children.push(node);
        }
        (lv, Node { multiplicity: 1, visible, daughters_invisible, children })
    }
    let (world, node) = build(&mut g, &mut rng, m, &mut counter, 1000.0, 0);
    g.set_world("World", world).unwrap();
    (g, node)
}

/// Expected rollout size: all touchables, or only those passing culling.
fn expected(node: &Node, level: usize, limit: Option<usize>, cull: bool) -> usize {
    let own = usize::from(!cull || node.visible);
    if limit.is_some_and(|l| level >= l) || (cull && node.daughters_invisible) {
        return own;
    }
    own + node.children.iter().map(|c| c.multiplicity * expected(c, level + 1, limit, cull)).sum::<usize>()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn descend_matches_tree(seed in any::<u64>(), limit in proptest::option::of(0usize..5), cull in any::<bool>()) {
        let (g, tree) = random_geometry(seed);
        let ts = g.descend(limit, cull).unwrap();
        prop_assert_eq!(ts.len(), expected(&tree, 0, limit, cull));
        let all = g.descend(limit, false).unwrap();
        let mut seen: HashSet<Vec<PathElement>> = HashSet::new();
        for t in &all {
            prop_assert!(limit.is_none_or(|l| t.path.len() <= l + 1));
            if t.path.len() > 1 {
                prop_assert!(seen.contains(&t.path[..t.path.len() - 1]), "parent after child");
            }
            prop_assert!(seen.insert(t.path.clone()), "duplicate path");
        }
        // Culling only removes touchables; order is kept.
        let mut it = all.iter();
        for t in &ts {
            prop_assert!(it.any(|a| a.path == t.path));
        }
    }

    #[test]
    fn parse_unparse_round_trip(
        cmd in 0usize..1000,
        tokens in proptest::collection::vec("[a-zA-Z0-9.!+-]{1,6}|\"[a-z #]{0,5}\"", 0..6),
    ) {
        let s = shell();
        let paths: Vec<String> = s.command_paths().map(str::to_string).collect();
        let path = &paths[cmd % paths.len()];
        let line = format!("{path} {}", tokens.join(" "));
        if let Ok(Some(parsed)) = s.parse(&line) {
            let again = s.parse(&parsed.unparse()).unwrap().unwrap();
            prop_assert_eq!(again, parsed);
        }
    }

    #[test]
    fn angle_units_agree(theta in 1.0f64..179.0, phi in 0.0f64..360.0) {
        let mut a = shell();
        let mut b = shell();
        a.execute("/vis/open SVG").unwrap();
        b.execute("/vis/open SVG").unwrap();
        a.execute(&format!("/vis/viewer/set/viewpointThetaPhi {theta} {phi} deg")).unwrap();
        b.execute(&format!("/vis/viewer/set/viewpointThetaPhi {} {} rad", theta.to_radians(), phi.to_radians())).unwrap();
        let (va, vb) = (a.vis.current_viewer().unwrap().view.viewpoint, b.vis.current_viewer().unwrap().view.viewpoint);
        prop_assert!((va - vb).norm() < 1e-6);
    }

    #[test]
    fn failed_commands_leave_state(commands in proptest::collection::vec(0usize..POOL.len(), 1..12)) {
        let mut s = shell();
        for &i in &commands {
            let before = s.vis.state_digest();
            if s.execute(POOL[i]).is_err() {
                prop_assert_eq!(s.vis.state_digest(), before, "{} changed state", POOL[i]);
            }
        }
    }

    #[test]
    fn same_commands_same_state(commands in proptest::collection::vec(0usize..POOL.len(), 1..12)) {
        let mut a = shell();
        let mut b = shell();
        for &i in &commands {
            let _ = a.execute(POOL[i]);
            let _ = b.execute(POOL[i]);
        }
        prop_assert_eq!(a.vis.state_digest(), b.vis.state_digest());
    }

    #[test]
    fn filter_algebra(tracks in proptest::collection::vec(track(), 1..40), keep in proptest::collection::vec("[a-z+-]{1,5}", 1..3)) {
        let f = TrajectoryFilter::particle("p", keep.iter().map(String::as_str));
        let g = TrajectoryFilter::charge("c", [1.0]);
        let inv = f.clone().inverted();
        let both = FilterChain::new(vec![f.clone(), g.clone()]);
        let mut off = f.clone();
        off.active = false;
        for t in &tracks {
            prop_assert_eq!(f.accept(t), keep.contains(&t.particle_name));
            prop_assert_eq!(inv.accept(t), !f.accept(t));
            prop_assert_eq!(both.accept(t), f.accept(t) && g.accept(t));
            prop_assert!(off.accept(t));
        }
        let once = both.apply(&tracks);
        prop_assert_eq!(both.apply(once.iter().copied()), once);
    }
}

/// Commands that either succeed or fail depending on what came before.
const POOL: &[&str] = &[
    "/vis/open SVG",
    "/vis/open SceneExport",
    "/vis/drawVolume",
    "/vis/drawVolume Shape1",
    "/vis/drawVolume NoSuchVolume",
    "/vis/viewer/set/viewpointThetaPhi 30 40",
    "/vis/viewer/set/viewpointVector 0 0 0",
    "/vis/viewer/set/upVector 0 0 1",
    "/vis/viewer/set/style surface",
    "/vis/viewer/zoom 2",
    "/vis/viewer/zoomTo -1",
    "/vis/viewer/flush",
    "/vis/viewer/select viewer-9",
    "/vis/scene/create",
    "/vis/scene/add/axes",
    "/vis/scene/add/scale",
    "/vis/scene/add/trajectories",
    "/vis/scene/add/volume Envelope",
    "/vis/scene/endOfEventAction accumulate 5",
    "/vis/set/colour red",
    "/vis/set/lineWidth 0",
    "/vis/geometry/set/colour Shape2 0 0 1 0",
    "/vis/modeling/trajectories/create/drawByParticleID",
    "/vis/filtering/trajectories/create/chargeFilter",
    "/run/beamOn 2",
    "/vis/viewer/set/projection p 95 deg",
];

fn track() -> impl Strategy<Value = Trajectory> {
    (prop::sample::select(vec!["e-", "e+", "gamma", "mu-", "proton"]), -1i32..=1, 0.1f64..1000.0).prop_map(
        |(name, q, ke)| Trajectory {
            track_id: 1,
            parent_id: 0,
            particle_name: name.to_string(),
            pdg_encoding: 0,
            charge: q as f64,
            initial_kinetic_energy: ke,
            initial_momentum: Vec3::new(0.0, 0.0, ke),
            points: vec![StepPoint { position: Vec3::zero(), energy_deposit: 0.0 }],
            creator_process: String::new(),
        },
    )
}

#[test]
fn macro_twice_gives_identical_state() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/startup.mac");
    let run = || {
        let mut s = shell();
        s.execute_macro(&path).unwrap();
        s.execute("/run/beamOn 3").unwrap();
        (s.vis.state_digest(), s.vis.state_text())
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
}

#[test]
fn macro_errors_name_the_line_and_keep_earlier_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mac");
    std::fs::write(&path, "/vis/set/colour red\n\n# fine so far\n/vis/set/lineWidth x\n/vis/set/colour blue\n")
        .unwrap();
    let mut s = shell();
    let err = s.execute_macro(&path).unwrap_err().to_string();
    assert!(err.contains("bad.mac:4:"), "{err}");
    assert_eq!(s.vis.defaults.colour, Colour::RED);
    assert_eq!(s.errors, 1);

    let looping = dir.path().join("self.mac");
    std::fs::write(&looping, format!("/control/execute {}\n", looping.display())).unwrap();
    let err = s.execute_macro(&looping).unwrap_err().to_string();
    assert!(err.ends_with("macro nesting deeper than 8"), "{err}");
}
