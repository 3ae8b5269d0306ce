//! Acceptance suite: one PASS/FAIL line per criterion, each timed against
//! its runtime limit. Exits non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use archlib_core::access::{Action, Authorizer, Decision, Role, User, Verdict};
use archlib_core::exchange::{parse_model, serialize_model, ModelDocument};
use archlib_core::lifecycle::{next_state, LifecycleState, TransitionAction};
use archlib_core::metrics::{
    complexity_score, connectivity_score, ComplexityRating, ConnectivityRating,
};
use archlib_core::taxonomy::{EntryKind, Scope};
use archlib_core::vault::{
    EntryMaster, OptionalInfo, RelationSpec, Vault, VaultConfig, VersionRef, MAIN_VARIANT,
};
use archlib_core::ErrorCode;
use archlib_testkit::fixtures::{
    build_graph, build_tree, category, main_ref, new_entry, populate, random_query, release_change,
    seed_users, BuiltNode, DepGraph, ADMIN, MODELER,
};
use archlib_testkit::models::{arb_model, sized_model};
use archlib_testkit::{oracles, rng};
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn users_vault() -> Vault {
    let v = Vault::in_memory(VaultConfig::default());
    seed_users(&v).expect("seed users");
    v
}

// ---- 1 ---------------------------------------------------------------------

fn metric_thresholds() -> Outcome {
    let counts = [
        (0, ComplexityRating::Easy),
        (19, ComplexityRating::Easy),
        (20, ComplexityRating::Moderate),
        (40, ComplexityRating::Moderate),
        (41, ComplexityRating::Complex),
    ];
    for (count, want) in counts {
        let doc = if count == 0 {
            ModelDocument::new("empty", "Empty")
        } else {
            sized_model(count / 2 + count % 2, count / 2)
        };
        let got = complexity_score(&doc);
        ensure(
            got.component_count == count as u64 && got.rating == want,
            || format!("{count} components rated {:?}", got.rating),
        )?;
    }
    let degrees = [
        ("0", 1, 0, ConnectivityRating::Simple),
        ("1.9", 20, 19, ConnectivityRating::Simple),
        ("2.0", 10, 10, ConnectivityRating::Average),
        ("3.0", 10, 15, ConnectivityRating::Average),
        ("3.1", 20, 31, ConnectivityRating::Difficult),
    ];
    for (label, elements, relationships, want) in degrees {
        let got = connectivity_score(&sized_model(elements, relationships))
            .map_err(|e| format!("degree {label}: {e}"))?;
        ensure(got.rating == want, || {
            format!("mean degree {label} rated {:?}", got.rating)
        })?;
    }
    Ok("5 counts, 5 degrees".into())
}

// ---- 2 ---------------------------------------------------------------------

fn exchange_round_trip() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 50,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(
            proptest::test_runner::RngAlgorithm::ChaCha,
        ),
    );
    let largest = std::cell::Cell::new(0);
    runner
        .run(&arb_model(200), |doc| {
            largest.set(
                largest
                    .get()
                    .max(doc.elements.len() + doc.relationships.len()),
            );
            let bytes = serialize_model(&doc).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let back = parse_model(&bytes).map_err(|e| TestCaseError::fail(e.to_string()))?;
            if back != doc {
                return Err(TestCaseError::fail("parse(serialize(m)) != m"));
            }
            let again = serialize_model(&back).map_err(|e| TestCaseError::fail(e.to_string()))?;
            if again != bytes {
                return Err(TestCaseError::fail("serialization is not stable"));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("50 models, largest {} nodes", largest.get()))
}

// ---- 3 ---------------------------------------------------------------------

fn cascade_closure() -> Outcome {
    let mut rng = rng(3);
    let mut flagged = 0;
    for trial in 0..50 {
        let n = rng.gen_range(1..=100);
        let graph = DepGraph::random(&mut rng, n);
        let vault = users_vault();
        let ids = build_graph(&vault, &graph, &mut rng).map_err(|e| e.to_string())?;
        let t = rng.gen_range(0..n);
        let (_, propagation) =
            release_change(&vault, &graph, &ids, t).map_err(|e| e.to_string())?;
        let got: BTreeSet<VersionRef> = propagation.affected.iter().cloned().collect();
        let want: BTreeSet<VersionRef> = oracles::cascade_closure(&graph, t)
            .into_iter()
            .map(|i| main_ref(&ids[i], 1))
            .collect();
        ensure(
            got.len() == propagation.affected.len() && got == want,
            || {
                format!(
                    "trial {trial}: {} flagged, oracle {}",
                    got.len(),
                    want.len()
                )
            },
        )?;
        flagged += got.len();
    }
    Ok(format!("50 graphs, {flagged} flagged versions"))
}

// ---- 4 ---------------------------------------------------------------------

fn lifecycle_soundness() -> Outcome {
    use LifecycleState::*;
    use TransitionAction::*;
    let legal = [
        (Draft, Release, Released),
        (Draft, Deprecate, Invalid),
        (Released, Implement, InUse),
        (Released, Deprecate, Invalid),
        (InUse, Deprecate, Invalid),
    ];
    for state in LifecycleState::ALL {
        for action in TransitionAction::ALL {
            let want = legal
                .iter()
                .find(|(s, a, _)| *s == state && *a == action)
                .map(|l| l.2);
            ensure(next_state(state, action) == want, || {
                format!("table mismatch at {state} + {action}")
            })?;
        }
    }

    let vault = users_vault();
    let cat = category(Scope::DomainNeutral, EntryKind::BuildingBlock);
    let mut expected: BTreeMap<VersionRef, LifecycleState> = BTreeMap::new();
    let mut ids = Vec::new();
    for i in 0..4 {
        let id = vault
            .create_entry(
                new_entry(&format!("E{i}"), cat, "Business", &[MODELER]),
                sized_model(2, 1),
                MODELER,
            )
            .map_err(|e| e.to_string())?
            .id;
        expected.insert(main_ref(&id, 1), Draft);
        ids.push(id);
    }
    let mut rng = rng(4);
    for step in 0..1000 {
        if rng.gen_bool(0.1) {
            let id = ids.choose(&mut rng).unwrap();
            let has_draft = expected.iter().any(|(r, s)| r.entry == *id && *s == Draft);
            match vault.new_version(id, MAIN_VARIANT, None, MODELER) {
                Ok(v) if !has_draft => {
                    expected.insert(main_ref(id, v.version_number), Draft);
                }
                Err(e) if has_draft && e.code() == ErrorCode::Conflict => {}
                other => return Err(format!("step {step}: new_version gave {other:?}")),
            }
            continue;
        }
        let r = expected
            .keys()
            .cloned()
            .collect::<Vec<_>>()
            .choose(&mut rng)
            .cloned()
            .unwrap();
        let action = *TransitionAction::ALL.choose(&mut rng).unwrap();
        let before = expected[&r];
        let result = vault.transition(&r, action, MODELER);
        match (next_state(before, action), result) {
            (Some(next), Ok(outcome)) if outcome.status.state == next => {
                expected.insert(r, next);
            }
            (None, Err(e)) if e.code() == ErrorCode::IllegalTransition => {}
            (want, got) => {
                return Err(format!(
                    "step {step}: {before} + {action}: wanted {want:?}, got {got:?}"
                ))
            }
        }
        let state = vault.snapshot();
        for (r, want) in &expected {
            let got = state.version(r).map_err(|e| e.to_string())?.status.state;
            ensure(got == *want, || {
                format!("step {step}: {r} is {got}, expected {want}")
            })?;
        }
    }
    let invalid = expected.values().filter(|s| **s == Invalid).count();
    Ok(format!(
        "12 table cells, 1000 steps, {invalid} versions ended Invalid"
    ))
}

// ---- 5 ---------------------------------------------------------------------

fn replacements(node: &BuiltNode) -> usize {
    node.children
        .iter()
        .map(|(child, placeholder)| usize::from(placeholder.is_some()) + replacements(child))
        .sum()
}

fn composite_resolution() -> Outcome {
    let mut rng = rng(5);
    let mut replaced = 0;
    for trial in 0..100 {
        let vault = users_vault();
        let root = build_tree(&vault, &mut rng, 4).map_err(|e| e.to_string())?;
        let resolved = vault
            .resolve_composite(&root.version)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(resolved == oracles::flatten(&root), || {
            format!("trial {trial}: resolution differs from the oracle")
        })?;
        replaced += replacements(&root);
    }
    ensure(replaced > 0, || "no Replace relation was exercised".into())?;
    Ok(format!("100 trees, {replaced} replace relations"))
}

// ---- 6 ---------------------------------------------------------------------

fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for item in std::fs::read_dir(&dir).expect("readable dir") {
            let path = item.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let bytes = std::fs::read(&path).expect("readable file");
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), bytes);
            }
        }
    }
    out
}

fn model_bytes(vault: &Vault) -> BTreeMap<VersionRef, Vec<u8>> {
    let state = vault.snapshot();
    let mut out = BTreeMap::new();
    for entry in state.entries.values() {
        for (variant, version) in entry.versions() {
            if let Some(model) = &version.model {
                out.insert(
                    entry.version_ref(variant, version),
                    serialize_model(model).expect("stored models are valid"),
                );
            }
        }
    }
    out
}

fn vault_durability() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (before, models) = {
        let v = Vault::init(dir.path(), VaultConfig::default()).map_err(|e| e.to_string())?;
        seed_users(&v).map_err(|e| e.to_string())?;
        populate(&v, &mut rng(6), 50).map_err(|e| e.to_string())?;
        (v.snapshot(), model_bytes(&v))
    };
    let files = read_tree(dir.path());
    let reopened = Vault::open(dir.path()).map_err(|e| e.to_string())?;
    ensure(*reopened.snapshot() == *before, || {
        "reloaded state differs".into()
    })?;
    ensure(model_bytes(&reopened) == models, || {
        "model payloads differ".into()
    })?;
    ensure(read_tree(dir.path()) == files, || {
        "reopening changed files on disk".into()
    })?;
    let issues = reopened.check_integrity();
    ensure(issues.is_empty(), || format!("integrity: {issues:?}"))?;
    Ok(format!(
        "{} entries, {} models, {} files",
        before.entries.len(),
        models.len(),
        files.len()
    ))
}

// ---- 7 ---------------------------------------------------------------------

fn search_equivalence() -> Outcome {
    let vault = users_vault();
    populate(&vault, &mut rng(7), 200).map_err(|e| e.to_string())?;
    let state = vault.snapshot();
    let mut rng = rng(77);
    let mut hits = 0;
    for i in 0..50 {
        let q = random_query(&mut rng);
        let got: Vec<_> = state
            .search(&q)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|h| (h.entry, h.score))
            .collect();
        ensure(got == oracles::search(&state, &q), || {
            format!("query {i} {q:?} differs from the linear scan")
        })?;
        hits += got.len();
    }
    Ok(format!("50 queries over 200 entries, {hits} hits"))
}

// ---- 8 ---------------------------------------------------------------------

struct DenyAll;

impl Authorizer for DenyAll {
    fn authorize(&self, _: &User, action: Action, subject: Option<&EntryMaster>) -> Decision {
        Decision {
            action,
            subject: subject.map(|m| m.id.clone()),
            verdict: Verdict::Deny {
                rule: "deny-all".into(),
                reason: "test double".into(),
            },
        }
    }
}

fn authorization_matrix() -> Outcome {
    let v = Vault::in_memory(VaultConfig::default());
    for role in Role::ALL {
        v.add_user(&format!("owner-{role}"), "Owner", role)
            .map_err(|e| e.to_string())?;
        v.add_user(&format!("other-{role}"), "Other", role)
            .map_err(|e| e.to_string())?;
    }
    let owners = ["owner-Reader", "owner-Modeler", "owner-Admin"];
    let cat = category(Scope::DomainNeutral, EntryKind::BuildingBlock);
    let id = v
        .create_entry(
            new_entry("Subject", cat, "Business", &owners),
            sized_model(1, 0),
            "owner-Admin",
        )
        .map_err(|e| e.to_string())?
        .id;
    for (role, responsible, action, allowed) in oracles::PERMISSIONS {
        let user = format!("{}-{role}", if responsible { "owner" } else { "other" });
        let decision = v
            .authorize(&user, action, Some(&id))
            .map_err(|e| e.to_string())?;
        ensure(decision.is_allowed() == allowed, || {
            format!("{role} responsible={responsible} {action}: expected allowed={allowed}")
        })?;
    }

    let v = users_vault();
    populate(&v, &mut rng(8), 12).map_err(|e| e.to_string())?;
    let v = v.with_authorizer(DenyAll);
    let before = v.snapshot();
    let entry = before
        .entries
        .values()
        .find(|e| !e.master.is_composite)
        .unwrap();
    let id = entry.master.id.clone();
    let latest = entry
        .variant(MAIN_VARIANT)
        .unwrap()
        .latest()
        .unwrap()
        .version_number;
    let r = main_ref(&id, latest);
    let core = || new_entry("New", cat, "Business", &[MODELER]);
    let attempts: Vec<archlib_core::Result<()>> = vec![
        v.create_entry(core(), sized_model(1, 0), ADMIN).map(drop),
        v.create_composite(
            core(),
            vec![RelationSpec::link(&main_ref(&id, 1))],
            None,
            ADMIN,
        )
        .map(drop),
        v.new_version(&id, MAIN_VARIANT, None, ADMIN).map(drop),
        v.new_variant(&id, "other", MAIN_VARIANT, 1, ADMIN)
            .map(drop),
        v.put_draft_model(&id, MAIN_VARIANT, sized_model(2, 0), ADMIN)
            .map(drop),
        v.set_draft_relations(&id, MAIN_VARIANT, Vec::new(), ADMIN)
            .map(drop),
        v.update_draft_details(
            &id,
            MAIN_VARIANT,
            OptionalInfo::default(),
            Vec::new(),
            ADMIN,
        )
        .map(drop),
        v.transition(&r, TransitionAction::Release, ADMIN).map(drop),
        v.transition(&r, TransitionAction::Implement, ADMIN)
            .map(drop),
        v.transition(&r, TransitionAction::Deprecate, ADMIN)
            .map(drop),
        v.acknowledge_check(&r, ADMIN).map(drop),
        v.add_feedback(&r, "hello", ADMIN).map(drop),
    ];
    let blocked = attempts
        .iter()
        .filter(|a| matches!(a, Err(e) if e.code() == ErrorCode::Auth))
        .count();
    ensure(blocked == attempts.len(), || {
        format!("deny-all blocked {blocked} of {} mutations", attempts.len())
    })?;
    ensure(*v.snapshot() == *before, || {
        "a denied mutation changed state".into()
    })?;
    Ok(format!("48 cases, {blocked} mutations denied"))
}

// ---- 9 ---------------------------------------------------------------------

struct Cli {
    vault: PathBuf,
    fixtures: PathBuf,
    steps: usize,
}

impl Cli {
    fn run(&mut self, user: Option<&str>, args: &[&str]) -> Result<String, String> {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_archlib"));
        cmd.env("ARCHLIB_VAULT", &self.vault)
            .env_remove("ARCHLIB_USER");
        if let Some(u) = user {
            cmd.args(["--as", u]);
        }
        let out = cmd.args(args).output().map_err(|e| e.to_string())?;
        self.steps += 1;
        if !out.status.success() {
            return Err(format!(
                "`archlib {}` exited {}: {}",
                args.join(" "),
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            ));
        }
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    }

    fn fixture(&self, name: &str) -> String {
        self.fixtures.join(name).display().to_string()
    }
}

fn incident_scenario() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let vault = dir.path().join("vault");
    let mut cli = Cli {
        vault: vault.clone(),
        fixtures: Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"),
        steps: 0,
    };
    let v = vault.display().to_string();
    cli.run(
        None,
        &["init", &v, "--keyword", "incident", "--keyword", "itil"],
    )?;
    for (user, role) in [
        ("ada", "admin"),
        ("mo", "modeler"),
        ("max", "modeler"),
        ("rita", "reader"),
    ] {
        cli.run(None, &["user", "add", user, "--role", role])?;
    }

    let model = cli.fixture("incident-management.xml");
    let reference = cli
        .run(
            Some("mo"),
            &[
                "entry",
                "create",
                "--title",
                "Incident Management Reference",
                "--category",
                "domain-specific/reference-model",
                "--layer",
                "Business",
                "--abstract",
                "Incident handling from detection to closure",
                "--keywords",
                "incident,itil",
                "--author",
                "mo",
                "--model",
                &model,
            ],
        )?
        .trim()
        .to_string();
    cli.run(Some("mo"), &["entry", "release", &reference])?;

    cli.run(
        Some("mo"),
        &[
            "entry",
            "variant",
            &reference,
            "contoso",
            "--from-version",
            "1",
        ],
    )?;
    let adapted = cli.fixture("incident-application.xml");
    cli.run(
        Some("mo"),
        &[
            "entry",
            "put-model",
            &reference,
            "--variant",
            "contoso",
            "--model",
            &adapted,
        ],
    )?;
    cli.run(
        Some("mo"),
        &["entry", "release", &reference, "--variant", "contoso"],
    )?;

    let ticketing = cli.fixture("ticketing.xml");
    let brick = cli
        .run(
            Some("max"),
            &[
                "entry",
                "create",
                "--title",
                "Ticketing System",
                "--category",
                "domain-neutral/building-block",
                "--layer",
                "Application",
                "--author",
                "max",
                "--model",
                &ticketing,
            ],
        )?
        .trim()
        .to_string();
    cli.run(Some("max"), &["entry", "release", &brick])?;

    let shell = cli.fixture("service-desk-shell.xml");
    let link = format!("{reference}:main:1");
    let replace = format!("{brick}:main:1@slot");
    let composite = cli
        .run(
            Some("max"),
            &[
                "entry",
                "composite",
                "--title",
                "Service Desk Operations",
                "--category",
                "company-specific/application-model",
                "--layer",
                "Application",
                "--keywords",
                "incident",
                "--author",
                "max",
                "--relation",
                &link,
                "--relation",
                &replace,
                "--parent-model",
                &shell,
            ],
        )?
        .trim()
        .to_string();
    cli.run(Some("max"), &["entry", "release", &composite])?;
    let resolved = cli.run(None, &["entry", "resolve", &composite])?;
    let resolved = parse_model(resolved.as_bytes()).map_err(|e| e.to_string())?;
    ensure(resolved.element("slot").is_none(), || {
        "placeholder survived resolution".into()
    })?;

    let metrics = cli.run(None, &["metrics", &model])?;
    ensure(metrics.starts_with("count=15 complexity=Easy"), || {
        format!("metrics: {metrics}")
    })?;

    let revised = cli.fixture("incident-management-v2.xml");
    cli.run(
        Some("mo"),
        &["entry", "version", &reference, "--model", &revised],
    )?;
    let released = cli.run(Some("mo"), &["entry", "release", &reference])?;
    let flagged = format!("check-required {composite}:main:1");
    ensure(released.contains(&flagged), || {
        format!("release printed: {released}")
    })?;

    let shown = cli.run(None, &["entry", "show", &composite])?;
    ensure(shown.contains("check=required("), || {
        format!("no check flag: {shown}")
    })?;
    let inbox = cli.run(Some("max"), &["inbox"])?;
    ensure(inbox.lines().any(|l| l.contains("\tnew\t")), || {
        format!("inbox: {inbox}")
    })?;

    cli.run(Some("max"), &["ack", &composite])?;
    let shown = cli.run(None, &["entry", "show", &composite])?;
    ensure(shown.contains("check=clear"), || {
        format!("check not cleared: {shown}")
    })?;

    cli.run(
        Some("rita"),
        &[
            "feedback",
            "add",
            &composite,
            "Escalation is missing from the service desk flow",
        ],
    )?;
    let comments = cli.run(None, &["feedback", "list", &composite])?;
    ensure(comments.contains("Escalation is missing"), || {
        format!("feedback: {comments}")
    })?;

    let hits = cli.run(None, &["search", "incident"])?;
    ensure(!hits.trim().is_empty(), || "search found nothing".into())?;
    cli.run(None, &["grid"])?;
    let check = cli.run(None, &["check"])?;
    ensure(check.trim() == "ok", || format!("check: {check}"))?;
    let issues = Vault::open(&vault)
        .map_err(|e| e.to_string())?
        .check_integrity();
    ensure(issues.is_empty(), || format!("integrity: {issues:?}"))?;
    Ok(format!("{} CLI steps", cli.steps))
}

// ---- harness ---------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "metric threshold conformance",
            Some(Duration::from_secs(1)),
            metric_thresholds,
        ),
        (
            "exchange round-trip",
            Some(Duration::from_secs(5)),
            exchange_round_trip,
        ),
        (
            "cascade equals closure",
            Some(Duration::from_secs(10)),
            cascade_closure,
        ),
        (
            "life-cycle soundness",
            Some(Duration::from_secs(5)),
            lifecycle_soundness,
        ),
        (
            "composite resolution",
            Some(Duration::from_secs(10)),
            composite_resolution,
        ),
        (
            "vault durability",
            Some(Duration::from_secs(10)),
            vault_durability,
        ),
        (
            "search oracle equivalence",
            Some(Duration::from_secs(5)),
            search_equivalence,
        ),
        ("authorization matrix", None, authorization_matrix),
        (
            "incident management scenario",
            Some(Duration::from_secs(10)),
            incident_scenario,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if took > limit => Err(format!(
                "took {:.2}s, limit {}s",
                took.as_secs_f64(),
                limit.as_secs()
            )),
            (o, _) => o,
        };
        let limit = limit.map_or("none".to_string(), |l| format!("{}s", l.as_secs()));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} criterion {} {name}: {detail} ({:.2}s, limit {limit})",
            i + 1,
            took.as_secs_f64()
        );
    }
    if failed == 0 {
        println!("acceptance: 9 of 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 9 criteria failed");
        ExitCode::FAILURE
    }
}
