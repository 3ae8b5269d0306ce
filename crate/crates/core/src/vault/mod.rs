//! The hierarchical entry store.
//!
//! An [`Entry`] owns one master record and any number of variants; each
//! variant holds a gapless sequence of versions. Composite entries hold
//! pinned relations to other entries' versions instead of copied model data.
//!
//! All mutations run through [`Vault::write`]: a single writer at a time
//! works on a private copy of the state, the touched files are persisted,
//! and only then is the new state published. Readers take an
//! [`Arc<VaultState>`] snapshot and never observe a half-applied change.

mod composite;
mod integrity;
mod store;
mod types;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::Utc;
use parking_lot::{Mutex, RwLock};

use crate::access::{Action, Authorizer, Role, RoleMatrix, User, Users};
use crate::discovery::SearchIndex;
use crate::error::{Error, Result};
use crate::exchange::{validate_model, ModelDocument};
use crate::lifecycle::{LifecycleState, LifecycleStatus, Notification};
use crate::metrics::{complexity_score, connectivity_score};

pub use integrity::IntegrityIssue;
pub use types::*;

/// On-disk layout version written to `vault.json`.
pub const FORMAT_VERSION: u32 = 1;

pub const MAIN_VARIANT: &str = "main";

/// Environment variable the CLI and server read the vault path from.
pub const VAULT_ENV: &str = "ARCHLIB_VAULT";

/// Everything a reader can see. Cheap to clone: entries are shared.
#[derive(Debug, Clone, PartialEq)]
pub struct VaultState {
    pub config: VaultConfig,
    pub users: Users,
    pub entries: BTreeMap<EntryId, Arc<Entry>>,
    pub notifications: Vec<Notification>,
    pub index: Arc<SearchIndex>,
}

impl VaultState {
    fn empty(config: VaultConfig) -> Self {
        Self {
            config,
            users: Users::default(),
            entries: BTreeMap::new(),
            notifications: Vec::new(),
            index: Arc::new(SearchIndex::default()),
        }
    }

    pub fn entry(&self, id: &EntryId) -> Result<&Entry> {
        self.entries
            .get(id)
            .map(Arc::as_ref)
            .ok_or_else(|| Error::NotFound(format!("entry {id}")))
    }

    pub fn variant(&self, id: &EntryId, variant: &str) -> Result<&Variant> {
        self.entry(id)?
            .variant(variant)
            .ok_or_else(|| Error::NotFound(format!("variant {variant} of entry {id}")))
    }

    pub fn version(&self, r: &VersionRef) -> Result<&EntryVersion> {
        self.variant(&r.entry, &r.variant)?
            .version(r.version)
            .ok_or_else(|| Error::NotFound(format!("version {r}")))
    }

    /// Entries matching `filter`, ordered by id.
    pub fn list_entries(&self, filter: &EntryFilter) -> Vec<&Entry> {
        self.entries
            .values()
            .map(Arc::as_ref)
            .filter(|e| filter.matches(e))
            .collect()
    }

    /// Flattens a composite version into a single model document.
    pub fn resolve_composite(&self, r: &VersionRef) -> Result<ModelDocument> {
        let entry = self.entry(&r.entry)?;
        if !entry.master.is_composite {
            return Err(Error::Validation(format!(
                "entry {} is not a composite",
                r.entry
            )));
        }
        self.version(r)?;
        composite::resolve(self, r)
    }
}

struct WriterState {
    ids: ulid::Generator,
}

/// A handle to one vault, shareable across threads.
pub struct Vault {
    root: Option<PathBuf>,
    state: RwLock<Arc<VaultState>>,
    writer: Mutex<WriterState>,
    authorizer: Box<dyn Authorizer>,
}

impl std::fmt::Debug for Vault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Vault")
            .field("root", &self.root)
            .finish_non_exhaustive()
    }
}

impl Vault {
    /// Creates a new vault directory. Fails if one already exists there.
    pub fn init(root: impl AsRef<Path>, config: VaultConfig) -> Result<Self> {
        let root = root.as_ref();
        store::init(root, &config)?;
        Ok(Self::from_state(
            Some(root.to_path_buf()),
            VaultState::empty(config),
        ))
    }

    /// Loads a vault directory. An empty or missing directory becomes a new
    /// vault with the default configuration.
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref();
        if !store::exists(root) {
            return Self::init(root, VaultConfig::default());
        }
        let mut state = store::load(root)?;
        let rebuilt = SearchIndex::build(&state);
        if store::load_index(root).as_ref() != Some(&rebuilt) {
            store::write_index(root, &rebuilt)?;
        }
        state.index = Arc::new(rebuilt);
        Ok(Self::from_state(Some(root.to_path_buf()), state))
    }

    /// A vault that lives only in memory.
    pub fn in_memory(config: VaultConfig) -> Self {
        Self::from_state(None, VaultState::empty(config))
    }

    fn from_state(root: Option<PathBuf>, state: VaultState) -> Self {
        Self {
            root,
            state: RwLock::new(Arc::new(state)),
            writer: Mutex::new(WriterState {
                ids: ulid::Generator::new(),
            }),
            authorizer: Box::new(RoleMatrix),
        }
    }

    /// Replaces the permission policy.
    pub fn with_authorizer(mut self, authorizer: impl Authorizer + 'static) -> Self {
        self.authorizer = Box::new(authorizer);
        self
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn snapshot(&self) -> Arc<VaultState> {
        self.state.read().clone()
    }

    pub fn config(&self) -> VaultConfig {
        self.snapshot().config.clone()
    }

    /// Runs `f` as one atomic mutation.
    pub(crate) fn write<T>(&self, f: impl FnOnce(&mut Txn<'_>) -> Result<T>) -> Result<T> {
        let mut writer = self.writer.lock();
        let base = self.snapshot();
        let mut txn = Txn {
            state: (*base).clone(),
            changes: Changes::default(),
            writer: &mut writer,
            authorizer: self.authorizer.as_ref(),
        };
        let out = f(&mut txn)?;

        let Txn {
            mut state, changes, ..
        } = txn;
        let touched = changes.touched_entries();
        if !touched.is_empty() {
            let index = Arc::make_mut(&mut state.index);
            for id in &touched {
                index.reindex(&state.entries[id]);
            }
        }
        if let Some(root) = &self.root {
            store::persist(root, &state, &changes)?;
        }
        *self.state.write() = Arc::new(state);
        Ok(out)
    }

    // ---- users ----------------------------------------------------------

    /// Registers a user. This is an operator action performed with direct
    /// access to the vault directory, so no actor is checked.
    pub fn add_user(&self, user_id: &str, display_name: &str, role: Role) -> Result<User> {
        self.write(|txn| {
            let user = txn.state.users.add(user_id, display_name, role, None)?;
            txn.changes.users = true;
            Ok(user)
        })
    }

    pub fn authenticate(&self, token: &str) -> Result<User> {
        self.snapshot().users.authenticate(token).cloned()
    }

    pub fn user(&self, user_id: &str) -> Result<User> {
        self.snapshot().users.get(user_id).cloned()
    }

    /// Evaluates the permission policy without performing anything.
    pub fn authorize(
        &self,
        user_id: &str,
        action: Action,
        subject: Option<&EntryId>,
    ) -> Result<crate::access::Decision> {
        let state = self.snapshot();
        let user = state.users.get(user_id)?;
        let master = subject
            .map(|id| state.entry(id).map(|e| &e.master))
            .transpose()?;
        Ok(self.authorizer.authorize(user, action, master))
    }

    // ---- reads ----------------------------------------------------------

    pub fn get_entry(&self, id: &EntryId) -> Result<Entry> {
        self.snapshot().entry(id).cloned()
    }

    pub fn get_version(&self, r: &VersionRef) -> Result<EntryVersion> {
        self.snapshot().version(r).cloned()
    }

    pub fn list_entries(&self, filter: &EntryFilter) -> Vec<EntryMaster> {
        self.snapshot()
            .list_entries(filter)
            .into_iter()
            .map(|e| e.master.clone())
            .collect()
    }

    pub fn resolve_composite(&self, r: &VersionRef) -> Result<ModelDocument> {
        self.snapshot().resolve_composite(r)
    }

    // ---- entries --------------------------------------------------------

    pub fn create_entry(
        &self,
        core: NewEntry,
        model: ModelDocument,
        actor: &str,
    ) -> Result<EntryMaster> {
        self.write(|txn| {
            txn.authorize(actor, Action::CreateEntry, None)?;
            let report = validate_model(&model);
            if !report.is_empty() {
                return Err(Error::Validation(format!("model: {report}")));
            }
            let (master, info, conditions) = txn.new_master(core, false)?;
            let version = txn.fresh_version(1, None, Some(model), Vec::new(), info, conditions)?;
            Ok(txn.insert_entry(master, version))
        })
    }

    pub fn create_composite(
        &self,
        core: NewEntry,
        relations: Vec<RelationSpec>,
        parent_model: Option<ModelDocument>,
        actor: &str,
    ) -> Result<EntryMaster> {
        self.write(|txn| {
            txn.authorize(actor, Action::CreateEntry, None)?;
            if let Some(shell) = &parent_model {
                let report = validate_model(shell);
                if !report.is_empty() {
                    return Err(Error::Validation(format!("parent model: {report}")));
                }
            }
            let (master, info, conditions) = txn.new_master(core, true)?;
            let relations = txn.pin_relations(&master.id, relations, parent_model.as_ref())?;
            let version = txn.fresh_version(1, None, parent_model, relations, info, conditions)?;
            let version = txn.with_composite_metrics(&master, version)?;
            Ok(txn.insert_entry(master, version))
        })
    }

    /// Starts the next version of a variant. Without a model the
    /// predecessor's model (and relations) are carried over.
    pub fn new_version(
        &self,
        entry: &EntryId,
        variant: &str,
        model: Option<ModelDocument>,
        actor: &str,
    ) -> Result<EntryVersion> {
        self.write(|txn| {
            txn.authorize(actor, Action::ModifyEntry, Some(entry))?;
            let current = txn.state.entry(entry)?;
            let master = current.master.clone();
            let latest = current
                .variant(variant)
                .ok_or_else(|| Error::NotFound(format!("variant {variant} of entry {entry}")))?
                .latest()
                .cloned()
                .ok_or_else(|| Error::NotFound(format!("versions of {entry}:{variant}")))?;
            if latest.is_draft() {
                return Err(Error::DraftExists {
                    entry: entry.to_string(),
                    variant: variant.to_string(),
                    version: latest.version_number,
                });
            }
            if let Some(m) = &model {
                let report = validate_model(m);
                if !report.is_empty() {
                    return Err(Error::Validation(format!("model: {report}")));
                }
            }
            let number = latest.version_number + 1;
            let model = model.or(latest.model);
            let mut version = txn.fresh_version(
                number,
                Some(latest.version_number),
                model,
                latest.relations,
                latest.optional_info,
                latest.conditions,
            )?;
            if master.is_composite {
                txn.check_placeholders(&version.relations, version.model.as_ref())?;
                version = txn.with_composite_metrics(&master, version)?;
            }
            txn.push_version(entry, variant, version.clone())?;
            Ok(version)
        })
    }

    /// Branches a new variant from a Released or InUse version.
    pub fn new_variant(
        &self,
        entry: &EntryId,
        name: &str,
        from_variant: &str,
        from_version: u32,
        actor: &str,
    ) -> Result<Variant> {
        self.write(|txn| {
            txn.authorize(actor, Action::ModifyEntry, Some(entry))?;
            validate_variant_name(name)?;
            let current = txn.state.entry(entry)?;
            if current.variant(name).is_some() {
                return Err(Error::DuplicateVariant(format!("{entry}:{name}")));
            }
            let origin = txn
                .state
                .version(&VersionRef::new(entry.clone(), from_variant, from_version))?
                .clone();
            if !matches!(
                origin.state(),
                LifecycleState::Released | LifecycleState::InUse
            ) {
                return Err(Error::OriginNotReleased(origin.state()));
            }
            let mut seeded = txn.fresh_version(
                1,
                None,
                origin.model,
                origin.relations,
                origin.optional_info,
                origin.conditions,
            )?;
            let master = current.master.clone();
            if master.is_composite {
                seeded = txn.with_composite_metrics(&master, seeded)?;
            }
            let variant = Variant {
                variant_id: name.to_string(),
                origin: Some(VariantOrigin {
                    variant: from_variant.to_string(),
                    version: from_version,
                }),
                created_at: Utc::now(),
                versions: vec![seeded],
            };
            let variants = &mut txn.entry_mut(entry)?.variants;
            variants.push(variant.clone());
            store::sort_variants(variants);
            txn.changes
                .variants
                .insert((entry.clone(), name.to_string()));
            txn.changes
                .versions
                .insert(VersionRef::new(entry.clone(), name, 1), true);
            Ok(variant)
        })
    }

    /// Replaces the model of the variant's open draft.
    pub fn put_draft_model(
        &self,
        entry: &EntryId,
        variant: &str,
        model: ModelDocument,
        actor: &str,
    ) -> Result<EntryVersion> {
        self.write(|txn| {
            txn.authorize(actor, Action::ModifyEntry, Some(entry))?;
            let report = validate_model(&model);
            if !report.is_empty() {
                return Err(Error::Validation(format!("model: {report}")));
            }
            let r = txn.open_draft(entry, variant)?;
            let master = txn.state.entry(entry)?.master.clone();
            let mut draft = txn.state.version(&r)?.clone();
            draft.model = Some(model);
            if master.is_composite {
                txn.check_placeholders(&draft.relations, draft.model.as_ref())?;
                draft = txn.with_composite_metrics(&master, draft)?;
            } else {
                draft = with_model_metrics(draft)?;
            }
            *txn.version_mut(&r, true)? = draft.clone();
            Ok(draft)
        })
    }

    /// Replaces the relations of a composite's open draft.
    pub fn set_draft_relations(
        &self,
        entry: &EntryId,
        variant: &str,
        relations: Vec<RelationSpec>,
        actor: &str,
    ) -> Result<EntryVersion> {
        self.write(|txn| {
            txn.authorize(actor, Action::ModifyEntry, Some(entry))?;
            let master = txn.state.entry(entry)?.master.clone();
            if !master.is_composite {
                return Err(Error::Validation(format!(
                    "entry {entry} is not a composite"
                )));
            }
            let r = txn.open_draft(entry, variant)?;
            let mut draft = txn.state.version(&r)?.clone();
            draft.relations = txn.pin_relations(entry, relations, draft.model.as_ref())?;
            let draft = txn.with_composite_metrics(&master, draft)?;
            *txn.version_mut(&r, false)? = draft.clone();
            Ok(draft)
        })
    }

    /// Replaces optional information and conditions on the open draft.
    pub fn update_draft_details(
        &self,
        entry: &EntryId,
        variant: &str,
        optional_info: OptionalInfo,
        conditions: Vec<Condition>,
        actor: &str,
    ) -> Result<EntryVersion> {
        self.write(|txn| {
            txn.authorize(actor, Action::ModifyEntry, Some(entry))?;
            let r = txn.open_draft(entry, variant)?;
            txn.check_optional_info(Some(entry), &optional_info)?;
            let draft = txn.version_mut(&r, false)?;
            draft.optional_info = optional_info;
            draft.conditions = conditions;
            Ok(draft.clone())
        })
    }

    pub fn check_integrity(&self) -> Vec<IntegrityIssue> {
        let state = self.snapshot();
        let mut issues = integrity::check_state(&state);
        if let Some(root) = &self.root {
            issues.extend(store::verify_disk(root, &state));
        }
        issues
    }
}

/// Files a transaction must write when it commits.
#[derive(Debug, Default)]
pub(crate) struct Changes {
    pub masters: BTreeSet<EntryId>,
    pub variants: BTreeSet<(EntryId, String)>,
    /// Version metadata to write; `true` when the model payload changed too.
    pub versions: BTreeMap<VersionRef, bool>,
    pub users: bool,
    pub notifications: bool,
}

impl Changes {
    fn touched_entries(&self) -> BTreeSet<EntryId> {
        self.masters
            .iter()
            .cloned()
            .chain(self.variants.iter().map(|(e, _)| e.clone()))
            .chain(self.versions.keys().map(|r| r.entry.clone()))
            .collect()
    }
}

/// A private working copy of the state, committed by [`Vault::write`].
pub(crate) struct Txn<'a> {
    pub state: VaultState,
    pub changes: Changes,
    writer: &'a mut WriterState,
    authorizer: &'a dyn Authorizer,
}

impl Txn<'_> {
    pub fn authorize(&self, actor: &str, action: Action, subject: Option<&EntryId>) -> Result<()> {
        let user = self.state.users.get(actor)?;
        let master = subject
            .map(|id| self.state.entry(id).map(|e| &e.master))
            .transpose()?;
        self.authorizer
            .authorize(user, action, master)
            .into_result(actor)
    }

    pub fn entry_mut(&mut self, id: &EntryId) -> Result<&mut Entry> {
        self.state
            .entries
            .get_mut(id)
            .map(Arc::make_mut)
            .ok_or_else(|| Error::NotFound(format!("entry {id}")))
    }

    /// Mutable access to a version; marks its metadata (and optionally its
    /// model) for writing.
    pub fn version_mut(
        &mut self,
        r: &VersionRef,
        model_changed: bool,
    ) -> Result<&mut EntryVersion> {
        let slot = self.changes.versions.entry(r.clone()).or_insert(false);
        *slot |= model_changed;
        self.entry_mut(&r.entry)?
            .variant_mut(&r.variant)
            .and_then(|v| v.versions.get_mut(r.version as usize - 1))
            .ok_or_else(|| Error::NotFound(format!("version {r}")))
    }

    fn open_draft(&self, entry: &EntryId, variant: &str) -> Result<VersionRef> {
        let latest = self
            .state
            .variant(entry, variant)?
            .latest()
            .ok_or_else(|| Error::NotFound(format!("versions of {entry}:{variant}")))?;
        if !latest.is_draft() {
            return Err(Error::Immutable(latest.state()));
        }
        Ok(VersionRef::new(
            entry.clone(),
            variant,
            latest.version_number,
        ))
    }

    fn new_master(
        &mut self,
        core: NewEntry,
        is_composite: bool,
    ) -> Result<(EntryMaster, OptionalInfo, Vec<Condition>)> {
        let title = core.title.trim();
        if title.is_empty() {
            return Err(Error::Validation("title must not be empty".into()));
        }
        let layer = self
            .state
            .config
            .layer(&core.layer)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "layer {:?} is not one of the configured layers ({})",
                    core.layer,
                    self.state.config.layers.join(", ")
                ))
            })?
            .to_string();
        if core.responsible_authors.is_empty() {
            return Err(Error::Validation(
                "at least one responsible author is required".into(),
            ));
        }
        if let Some(unknown) = core
            .responsible_authors
            .iter()
            .find(|a| !self.state.users.contains(a))
        {
            return Err(Error::Validation(format!(
                "responsible author {unknown} is not a registered user"
            )));
        }
        let keywords: BTreeSet<String> = core
            .keywords
            .iter()
            .map(|k| k.trim().to_string())
            .filter(|k| !k.is_empty())
            .collect();
        self.check_optional_info(None, &core.optional_info)?;

        let id = self
            .writer
            .ids
            .generate()
            .map(EntryId::from_ulid)
            .map_err(|e| Error::Conflict(format!("id generation failed: {e}")))?;
        let master = EntryMaster {
            id,
            title: title.to_string(),
            category: core.category,
            layer,
            abstract_text: core.abstract_text.trim().to_string(),
            keywords,
            responsible_authors: core.responsible_authors,
            is_composite,
            created_at: Utc::now(),
        };
        Ok((master, core.optional_info, core.conditions))
    }

    fn check_optional_info(&self, owner: Option<&EntryId>, info: &OptionalInfo) -> Result<()> {
        for id in info.entry_refs() {
            if Some(id) == owner {
                return Err(Error::Validation(format!(
                    "entry {id} cannot reference itself"
                )));
            }
            if !self.state.entries.contains_key(id) {
                return Err(Error::Validation(format!(
                    "optional information references unknown entry {id}"
                )));
            }
        }
        Ok(())
    }

    fn fresh_version(
        &self,
        number: u32,
        predecessor: Option<u32>,
        model: Option<ModelDocument>,
        relations: Vec<CompositeRelation>,
        optional_info: OptionalInfo,
        conditions: Vec<Condition>,
    ) -> Result<EntryVersion> {
        let now = Utc::now();
        let version = EntryVersion {
            version_number: number,
            created_at: now,
            status: LifecycleStatus::draft(now),
            complexity: complexity_score(&ModelDocument::default()),
            connectivity: None,
            model,
            optional_info,
            conditions,
            relations,
            predecessor,
            feedback: Vec::new(),
        };
        with_model_metrics(version)
    }

    /// Scores a composite over its flattened content.
    fn with_composite_metrics(
        &self,
        master: &EntryMaster,
        mut version: EntryVersion,
    ) -> Result<EntryVersion> {
        let flat = composite::flatten(
            &self.state,
            master.id.as_str(),
            &master.title,
            version.model.as_ref(),
            &version.relations,
        )?;
        version.complexity = complexity_score(&flat);
        version.connectivity = connectivity_score(&flat).ok();
        Ok(version)
    }

    fn pin_relations(
        &self,
        owner: &EntryId,
        specs: Vec<RelationSpec>,
        shell: Option<&ModelDocument>,
    ) -> Result<Vec<CompositeRelation>> {
        let relations = specs
            .into_iter()
            .map(|spec| composite::pin(&self.state, spec))
            .collect::<Result<Vec<_>>>()?;
        let mut targets = BTreeSet::new();
        for r in &relations {
            if !targets.insert(&r.target.entry) {
                return Err(Error::Validation(format!(
                    "entry {} is related more than once; each child appears once per composite",
                    r.target.entry
                )));
            }
        }
        composite::check_acyclic(
            &self.state,
            owner,
            relations.iter().map(|r| &r.target.entry),
        )?;
        self.check_placeholders(&relations, shell)?;
        Ok(relations)
    }

    fn check_placeholders(
        &self,
        relations: &[CompositeRelation],
        shell: Option<&ModelDocument>,
    ) -> Result<()> {
        let mut used = BTreeSet::new();
        for r in relations {
            match (r.kind, &r.placeholder) {
                (RelationKind::Replace, None) => {
                    return Err(Error::MissingPlaceholder(String::new()));
                }
                (RelationKind::Replace, Some(p)) => {
                    if shell.and_then(|s| s.element(p)).is_none() {
                        return Err(Error::MissingPlaceholder(p.clone()));
                    }
                    if !used.insert(p) {
                        return Err(Error::Validation(format!(
                            "placeholder {p} is replaced twice"
                        )));
                    }
                }
                (RelationKind::Link, Some(p)) => {
                    return Err(Error::Validation(format!(
                        "link relation to {} names placeholder {p}",
                        r.target
                    )));
                }
                (RelationKind::Link, None) => {}
            }
        }
        Ok(())
    }

    fn insert_entry(&mut self, master: EntryMaster, version: EntryVersion) -> EntryMaster {
        let id = master.id.clone();
        let entry = Entry {
            master: master.clone(),
            variants: vec![Variant {
                variant_id: MAIN_VARIANT.to_string(),
                origin: None,
                created_at: master.created_at,
                versions: vec![version],
            }],
        };
        self.state.entries.insert(id.clone(), Arc::new(entry));
        self.changes.masters.insert(id.clone());
        self.changes
            .variants
            .insert((id.clone(), MAIN_VARIANT.to_string()));
        self.changes
            .versions
            .insert(VersionRef::new(id, MAIN_VARIANT, 1), true);
        master
    }

    fn push_version(
        &mut self,
        entry: &EntryId,
        variant: &str,
        version: EntryVersion,
    ) -> Result<()> {
        let r = VersionRef::new(entry.clone(), variant, version.version_number);
        self.entry_mut(entry)?
            .variant_mut(variant)
            .ok_or_else(|| Error::NotFound(format!("variant {variant} of entry {entry}")))?
            .versions
            .push(version);
        self.changes.versions.insert(r, true);
        Ok(())
    }
}

fn with_model_metrics(mut version: EntryVersion) -> Result<EntryVersion> {
    if let Some(model) = &version.model {
        version.complexity = complexity_score(model);
        version.connectivity = connectivity_score(model).ok();
    }
    Ok(version)
}

fn validate_variant_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name.len() <= 64
        && name
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphanumeric())
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "variant name {name:?} must be 1-64 characters of letters, digits, '-', '_' or '.', starting with a letter or digit"
        )))
    }
}
