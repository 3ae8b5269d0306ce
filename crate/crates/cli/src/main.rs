//! `archlib`, the command-line face of the model library.
//!
//! Every command except `init` works on the vault named by `--vault` or
//! `ARCHLIB_VAULT`. Mutations act as the user given by `--as` or
//! `ARCHLIB_USER`. Failures print `error[CODE]: message` on stderr and exit
//! with status 1; usage errors exit with status 2.

use std::collections::BTreeSet;
use std::fmt;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use archlib_core::access::Role;
use archlib_core::discovery::SearchQuery;
use archlib_core::exchange::{parse_model, serialize_model, ModelDocument};
use archlib_core::lifecycle::{LifecycleState, TransitionAction};
use archlib_core::metrics::MetricsReport;
use archlib_core::taxonomy::{default_layers, Category, CategoryFilter};
use archlib_core::vault::{
    EntryFilter, EntryId, EntryVersion, NewEntry, OptionalInfo, RelationSpec, Vault, VaultConfig,
    VersionRef, MAIN_VARIANT,
};
use archlib_core::{Error, ErrorCode};
use archlib_server::ServerConfig;

#[derive(Parser)]
#[command(
    name = "archlib",
    version,
    about = "Versioned enterprise model library"
)]
struct Cli {
    /// Vault directory.
    #[arg(long, global = true, env = "ARCHLIB_VAULT")]
    vault: Option<PathBuf>,
    /// User id that mutations act as.
    #[arg(long = "as", global = true, env = "ARCHLIB_USER")]
    user: Option<String>,
    /// Print JSON instead of lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create an empty vault.
    Init {
        dir: PathBuf,
        /// Layer rows, top to bottom; repeatable.
        #[arg(long = "layer")]
        layers: Vec<String>,
        /// Controlled keyword vocabulary; repeatable.
        #[arg(long = "keyword")]
        keywords: Vec<String>,
    },
    /// Manage users and their tokens.
    #[command(subcommand)]
    User(UserCommand),
    /// Create, inspect and move entries through their life-cycle.
    #[command(subcommand)]
    Entry(EntryCommand),
    /// Score exchange documents, one line per file.
    Metrics {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Ranked search over title, abstract and keywords.
    Search {
        terms: Vec<String>,
        #[arg(long = "keyword")]
        keywords: Vec<String>,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// Entry counts per layer and scope.
    Grid,
    /// Notifications of the acting user.
    Inbox,
    /// Clear the pending check on a version.
    Ack(Target),
    /// Review comments on versions.
    #[command(subcommand)]
    Feedback(FeedbackCommand),
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Allowed browser origin; repeatable, `*` for any.
        #[arg(long = "cors-origin")]
        cors_origins: Vec<String>,
        /// Built web UI to serve outside `/api/v1`.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
    /// Verify stored files against their invariants.
    Check,
}

#[derive(Subcommand)]
enum UserCommand {
    /// Register a user and print its token.
    Add {
        user_id: String,
        #[arg(long)]
        name: Option<String>,
        /// reader, modeler or admin.
        #[arg(long)]
        role: Role,
    },
    /// Registered users with their roles.
    List,
}

#[derive(Subcommand)]
enum EntryCommand {
    /// Create an entry from an exchange document; prints the entry id.
    Create {
        #[command(flatten)]
        core: CoreArgs,
        #[arg(long)]
        model: PathBuf,
    },
    /// Create a composite entry; prints the entry id.
    Composite {
        #[command(flatten)]
        core: CoreArgs,
        /// `ENTRY:VARIANT:VERSION`, with `@ELEMENT` appended to replace a
        /// placeholder; repeatable.
        #[arg(long = "relation", required = true)]
        relations: Vec<RelationSpec>,
        #[arg(long)]
        parent_model: Option<PathBuf>,
    },
    /// Print an entry with one line per version.
    Show { id: EntryId },
    /// List entry masters, optionally filtered.
    List {
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// Open a new draft version; without `--model` the model carries over.
    Version {
        id: EntryId,
        #[arg(long, default_value = MAIN_VARIANT)]
        variant: String,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Derive a variant from a released version.
    Variant {
        id: EntryId,
        name: String,
        #[arg(long, default_value = MAIN_VARIANT)]
        from_variant: String,
        #[arg(long)]
        from_version: u32,
    },
    /// Replace the model of the draft version.
    PutModel {
        id: EntryId,
        #[arg(long, default_value = MAIN_VARIANT)]
        variant: String,
        #[arg(long)]
        model: PathBuf,
    },
    /// Draft to Released; flags dependents for a check.
    Release(Target),
    /// Released to InUse.
    Implement(Target),
    /// Any live state to Invalid.
    Deprecate(Target),
    /// Print the flattened model of a version as XML.
    Resolve(Target),
    /// Print the stored model of a version as XML.
    Model(Target),
}

#[derive(Subcommand)]
enum FeedbackCommand {
    /// Comment on a version.
    Add {
        #[command(flatten)]
        target: Target,
        text: String,
    },
    /// Comments on a version, oldest first.
    List(Target),
}

#[derive(Args)]
struct CoreArgs {
    #[arg(long)]
    title: String,
    /// `scope/kind`, e.g. `domain-specific/reference-model`.
    #[arg(long)]
    category: Category,
    #[arg(long)]
    layer: String,
    #[arg(long = "abstract", default_value = "")]
    abstract_text: String,
    /// Comma-separated or repeated.
    #[arg(long = "keywords", value_delimiter = ',')]
    keywords: Vec<String>,
    /// Responsible author; repeatable.
    #[arg(long = "author", required = true)]
    authors: Vec<String>,
    /// Applied building block entry; repeatable.
    #[arg(long = "brick")]
    bricks: Vec<EntryId>,
    #[arg(long)]
    application_context: Option<String>,
}

impl CoreArgs {
    fn into_new_entry(self) -> NewEntry {
        NewEntry {
            title: self.title,
            category: self.category,
            layer: self.layer,
            abstract_text: self.abstract_text,
            keywords: self
                .keywords
                .into_iter()
                .map(|k| k.trim().to_string())
                .filter(|k| !k.is_empty())
                .collect(),
            responsible_authors: self.authors.into_iter().collect(),
            optional_info: OptionalInfo {
                bricks: self.bricks,
                application_context: self.application_context,
                ..OptionalInfo::default()
            },
            conditions: Vec::new(),
        }
    }
}

#[derive(Args)]
struct FilterArgs {
    /// `scope` or `scope/kind`.
    #[arg(long)]
    category: Option<CategoryFilter>,
    #[arg(long)]
    layer: Option<String>,
    #[arg(long)]
    state: Option<LifecycleState>,
}

#[derive(Args)]
struct Target {
    id: EntryId,
    #[arg(long, default_value = MAIN_VARIANT)]
    variant: String,
    /// Defaults to the newest version of the variant.
    #[arg(long)]
    version: Option<u32>,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Other(ErrorCode, String),
}

impl Failure {
    fn code(&self) -> ErrorCode {
        match self {
            Failure::Core(e) => e.code(),
            Failure::Other(code, _) => *code,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Other(_, m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}

struct Ctx {
    vault_dir: Option<PathBuf>,
    user: Option<String>,
    json: bool,
}

impl Ctx {
    fn open(&self) -> CliResult<Vault> {
        let dir = self.vault_dir.as_ref().ok_or_else(|| {
            Failure::Other(
                ErrorCode::Validation,
                "no vault given; pass --vault or set ARCHLIB_VAULT".into(),
            )
        })?;
        if !dir.is_dir() {
            return Err(Failure::Other(
                ErrorCode::NotFound,
                format!(
                    "no vault at {}; create one with `archlib init`",
                    dir.display()
                ),
            ));
        }
        Ok(Vault::open(dir)?)
    }

    fn actor(&self) -> CliResult<&str> {
        self.user.as_deref().ok_or_else(|| {
            Failure::Other(
                ErrorCode::Auth,
                "no acting user; pass --as or set ARCHLIB_USER".into(),
            )
        })
    }

    fn print_json(&self, value: impl serde::Serialize) {
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("serializable")
        );
    }
}

fn run(cli: Cli) -> CliResult {
    let ctx = Ctx {
        vault_dir: cli.vault,
        user: cli.user,
        json: cli.json,
    };
    match cli.command {
        Command::Init {
            dir,
            layers,
            keywords,
        } => {
            let config = VaultConfig {
                layers: if layers.is_empty() {
                    default_layers()
                } else {
                    layers
                },
                keywords,
                ..VaultConfig::default()
            };
            Vault::init(&dir, config)?;
            println!("initialized {}", dir.display());
            Ok(())
        }
        Command::User(cmd) => user(&ctx, cmd),
        Command::Entry(cmd) => entry(&ctx, cmd),
        Command::Metrics { files } => {
            for file in files {
                let report = MetricsReport::of(&read_model(&file)?);
                if ctx.json {
                    ctx.print_json(&report);
                } else {
                    println!("{report}");
                }
            }
            Ok(())
        }
        Command::Search {
            terms,
            keywords,
            filter,
        } => {
            let vault = ctx.open()?;
            let mut query = SearchQuery::default();
            for t in &terms {
                query.terms.extend(SearchQuery::text(t).terms);
            }
            query.keywords = keywords;
            query.category = filter.category;
            query.layer = filter.layer;
            query.state = filter.state;
            let hits = vault.search(&query)?;
            if ctx.json {
                ctx.print_json(&hits);
            } else {
                let snap = vault.snapshot();
                for hit in hits {
                    let title = &snap.entry(&hit.entry)?.master.title;
                    println!("{}\t{}\t{}", hit.score, hit.entry, title);
                }
            }
            Ok(())
        }
        Command::Grid => {
            let grid = ctx.open()?.overview_grid();
            if ctx.json {
                ctx.print_json(&grid);
                return Ok(());
            }
            let header: Vec<&str> = grid.columns.iter().map(|c| c.as_str()).collect();
            println!("layer\t{}", header.join("\t"));
            for (layer, cells) in grid.rows.iter().zip(&grid.cells) {
                let cells: Vec<String> = cells.iter().map(|n| n.to_string()).collect();
                println!("{layer}\t{}", cells.join("\t"));
            }
            Ok(())
        }
        Command::Inbox => {
            let vault = ctx.open()?;
            let actor = ctx.actor()?;
            vault.user(actor)?;
            let notes = vault.list_notifications(actor);
            if ctx.json {
                ctx.print_json(&notes);
            } else {
                for n in notes {
                    let flag = if n.acknowledged { "read" } else { "new" };
                    println!(
                        "{}\t{flag}\taffected={}\tcause={}",
                        n.seq, n.affected, n.cause
                    );
                }
            }
            Ok(())
        }
        Command::Ack(target) => {
            let vault = ctx.open()?;
            let r = resolve_target(&vault, &target)?;
            let status = vault.acknowledge_check(&r, ctx.actor()?)?;
            if ctx.json {
                ctx.print_json(&status);
            } else {
                println!("{r} {} check=clear", status.state);
            }
            Ok(())
        }
        Command::Feedback(cmd) => feedback(&ctx, cmd),
        Command::Serve {
            bind,
            cors_origins,
            ui_dir,
        } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| "info".into()),
                )
                .init();
            let vault = Arc::new(ctx.open()?);
            let config = ServerConfig {
                cors_origins,
                ui_dir,
            };
            let runtime = tokio::runtime::Runtime::new()
                .map_err(|e| Failure::Other(ErrorCode::Storage, e.to_string()))?;
            runtime
                .block_on(archlib_server::serve(vault, bind, config))
                .map_err(|e| Failure::Other(ErrorCode::Storage, format!("{bind}: {e}")))
        }
        Command::Check => {
            let issues = ctx.open()?.check_integrity();
            for issue in &issues {
                println!("{issue}");
            }
            if issues.is_empty() {
                println!("ok");
                Ok(())
            } else {
                Err(Failure::Other(
                    ErrorCode::Storage,
                    format!("{} integrity issue(s)", issues.len()),
                ))
            }
        }
    }
}

fn user(ctx: &Ctx, cmd: UserCommand) -> CliResult {
    let vault = ctx.open()?;
    match cmd {
        UserCommand::Add {
            user_id,
            name,
            role,
        } => {
            let name = name.unwrap_or_else(|| user_id.clone());
            let user = vault.add_user(&user_id, &name, role)?;
            if ctx.json {
                ctx.print_json(&user);
            } else {
                println!("{}\t{}\t{}", user.user_id, user.role, user.token);
            }
        }
        UserCommand::List => {
            let snap = vault.snapshot();
            if ctx.json {
                let users: Vec<_> = snap
                    .users
                    .iter()
                    .map(|u| json!({"user_id": u.user_id, "display_name": u.display_name, "role": u.role}))
                    .collect();
                ctx.print_json(users);
            } else {
                for u in snap.users.iter() {
                    println!("{}\t{}\t{}", u.user_id, u.role, u.display_name);
                }
            }
        }
    }
    Ok(())
}

fn entry(ctx: &Ctx, cmd: EntryCommand) -> CliResult {
    let vault = ctx.open()?;
    match cmd {
        EntryCommand::Create { core, model } => {
            let doc = read_model(&model)?;
            let core = core.into_new_entry();
            warn_keywords(&vault, &core.keywords);
            let master = vault.create_entry(core, doc, ctx.actor()?)?;
            print_id(ctx, &master.id);
        }
        EntryCommand::Composite {
            core,
            relations,
            parent_model,
        } => {
            let shell = parent_model.as_deref().map(read_model).transpose()?;
            let core = core.into_new_entry();
            warn_keywords(&vault, &core.keywords);
            let master = vault.create_composite(core, relations, shell, ctx.actor()?)?;
            print_id(ctx, &master.id);
        }
        EntryCommand::Show { id } => {
            let entry = vault.get_entry(&id)?;
            if ctx.json {
                ctx.print_json(archlib_server::views::EntryView::from(&entry));
                return Ok(());
            }
            let m = &entry.master;
            println!("id={}", m.id);
            println!("title={}", m.title);
            println!("category={}", m.category);
            println!("layer={}", m.layer);
            println!("composite={}", m.is_composite);
            println!("authors={}", join(&m.responsible_authors));
            println!("keywords={}", join(&m.keywords));
            for variant in &entry.variants {
                for v in &variant.versions {
                    println!("{}", version_line(&entry.version_ref(variant, v), v));
                }
            }
        }
        EntryCommand::List { filter } => {
            let masters = vault.list_entries(&EntryFilter {
                category: filter.category,
                layer: filter.layer,
                state: filter.state,
            });
            if ctx.json {
                ctx.print_json(&masters);
            } else {
                for m in masters {
                    println!("{}\t{}\t{}\t{}", m.id, m.category, m.layer, m.title);
                }
            }
        }
        EntryCommand::Version { id, variant, model } => {
            let doc = model.as_deref().map(read_model).transpose()?;
            let v = vault.new_version(&id, &variant, doc, ctx.actor()?)?;
            print_version(ctx, &VersionRef::new(id, variant, v.version_number), &v);
        }
        EntryCommand::Variant {
            id,
            name,
            from_variant,
            from_version,
        } => {
            let variant =
                vault.new_variant(&id, &name, &from_variant, from_version, ctx.actor()?)?;
            let v = variant.latest().expect("a new variant has a draft");
            print_version(ctx, &VersionRef::new(id, name, v.version_number), v);
        }
        EntryCommand::PutModel { id, variant, model } => {
            let v = vault.put_draft_model(&id, &variant, read_model(&model)?, ctx.actor()?)?;
            print_version(ctx, &VersionRef::new(id, variant, v.version_number), &v);
        }
        EntryCommand::Release(t) => transition(ctx, &vault, &t, TransitionAction::Release)?,
        EntryCommand::Implement(t) => transition(ctx, &vault, &t, TransitionAction::Implement)?,
        EntryCommand::Deprecate(t) => transition(ctx, &vault, &t, TransitionAction::Deprecate)?,
        EntryCommand::Resolve(t) => {
            let r = resolve_target(&vault, &t)?;
            print_xml(&vault.resolve_composite(&r)?)?;
        }
        EntryCommand::Model(t) => {
            let r = resolve_target(&vault, &t)?;
            let v = vault.get_version(&r)?;
            let doc = v.model.ok_or_else(|| {
                Failure::Other(ErrorCode::NotFound, format!("{r} stores no model"))
            })?;
            print_xml(&doc)?;
        }
    }
    Ok(())
}

fn feedback(ctx: &Ctx, cmd: FeedbackCommand) -> CliResult {
    let vault = ctx.open()?;
    match cmd {
        FeedbackCommand::Add { target, text } => {
            let r = resolve_target(&vault, &target)?;
            let comment = vault.add_feedback(&r, &text, ctx.actor()?)?;
            if ctx.json {
                ctx.print_json(&comment);
            } else {
                println!("{r}\t{}\t{}", comment.author, comment.at.to_rfc3339());
            }
        }
        FeedbackCommand::List(target) => {
            let r = resolve_target(&vault, &target)?;
            let comments = vault.feedback(&r)?;
            if ctx.json {
                ctx.print_json(&comments);
            } else {
                for c in comments {
                    println!("{}\t{}\t{}", c.at.to_rfc3339(), c.author, c.text);
                }
            }
        }
    }
    Ok(())
}

fn transition(ctx: &Ctx, vault: &Vault, t: &Target, action: TransitionAction) -> CliResult {
    let r = resolve_target(vault, t)?;
    let outcome = vault.transition(&r, action, ctx.actor()?)?;
    if ctx.json {
        ctx.print_json(&outcome);
        return Ok(());
    }
    println!("{r} {}", outcome.status.state);
    if let Some(p) = outcome.propagation {
        for affected in p.affected {
            println!("check-required {affected}");
        }
    }
    Ok(())
}

fn resolve_target(vault: &Vault, t: &Target) -> CliResult<VersionRef> {
    let version = match t.version {
        Some(n) => n,
        None => {
            let snap = vault.snapshot();
            snap.variant(&t.id, &t.variant)?
                .latest()
                .map(|v| v.version_number)
                .ok_or_else(|| {
                    Failure::Other(
                        ErrorCode::NotFound,
                        format!("{}:{} has no versions", t.id, t.variant),
                    )
                })?
        }
    };
    Ok(VersionRef::new(t.id.clone(), t.variant.clone(), version))
}

fn read_model(path: &Path) -> CliResult<ModelDocument> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Other(ErrorCode::Validation, format!("{}: {e}", path.display())))?;
    parse_model(&bytes).map_err(|e| {
        Failure::Other(
            ErrorCode::Validation,
            format!("{}: {}", path.display(), Error::from(e)),
        )
    })
}

fn print_xml(doc: &ModelDocument) -> CliResult {
    let bytes = serialize_model(doc).map_err(Error::from)?;
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(())
}

fn print_id(ctx: &Ctx, id: &EntryId) {
    if ctx.json {
        ctx.print_json(json!({ "id": id }));
    } else {
        println!("{id}");
    }
}

fn print_version(ctx: &Ctx, r: &VersionRef, v: &EntryVersion) {
    if ctx.json {
        ctx.print_json(v);
    } else {
        println!("{}", version_line(r, v));
    }
}

fn version_line(r: &VersionRef, v: &EntryVersion) -> String {
    let connectivity = match &v.connectivity {
        Some(k) => format!("{}({})", k.rating, k.display_degree()),
        None => "none".to_string(),
    };
    let check = match &v.status.check_reason {
        Some(cause) if v.status.check_required => format!("required({cause})"),
        _ => "clear".to_string(),
    };
    format!(
        "{r}\t{}\tcomplexity={}({})\tconnectivity={connectivity}\tcheck={check}",
        v.status.state, v.complexity.rating, v.complexity.component_count
    )
}

fn warn_keywords(vault: &Vault, keywords: &BTreeSet<String>) {
    for k in vault.keyword_warnings(keywords) {
        eprintln!("warning: unknown keyword {k}");
    }
}

fn join(items: &BTreeSet<String>) -> String {
    items.iter().cloned().collect::<Vec<_>>().join(",")
}
