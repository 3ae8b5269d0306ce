use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;

use archlib_core::access::{Action, User};
use archlib_core::discovery::{SearchHit, SearchQuery};
use archlib_core::exchange::{parse_model, serialize_model, ModelDocument, CONTENT_TYPE};
use archlib_core::lifecycle::{LifecycleState, TransitionAction};
use archlib_core::metrics::MetricsReport;
use archlib_core::vault::{EntryFilter, EntryId, EntryMaster, Vault, VersionRef};
use archlib_core::Error;

use crate::error::ApiError;
use crate::views::{
    CreateCompositeRequest, CreateEntryRequest, DraftDetailsRequest, EntryView, FeedbackRequest,
    MeView, NewVariantRequest, Page, PermissionsView,
};
use crate::{DEFAULT_LIMIT, MAX_LIMIT};

type AppState = Arc<Vault>;
type ApiResult<T> = Result<T, ApiError>;

pub(crate) fn api(vault: Arc<Vault>) -> Router {
    let version = "/entries/{id}/variants/{variant}/versions/{n}";
    let draft = "/entries/{id}/variants/{variant}/draft";
    Router::new()
        .route("/me", get(me))
        .route("/entries", get(list_entries).post(create_entry))
        .route("/composites", post(create_composite))
        .route("/entries/{id}", get(get_entry))
        .route("/entries/{id}/permissions", get(permissions))
        .route("/entries/{id}/variants", post(new_variant))
        .route(
            "/entries/{id}/variants/{variant}/versions",
            post(new_version),
        )
        .route(version, get(get_version))
        .route(&format!("{version}/model"), get(version_model))
        .route(&format!("{version}/resolved"), get(resolved_model))
        .route(&format!("{version}/metrics"), get(version_metrics))
        .route(&format!("{version}/release"), post(release))
        .route(&format!("{version}/implement"), post(implement))
        .route(&format!("{version}/deprecate"), post(deprecate))
        .route(&format!("{version}/acknowledge"), post(acknowledge))
        .route(
            &format!("{version}/feedback"),
            get(list_feedback).post(add_feedback),
        )
        .route(
            &format!("{draft}/model"),
            get(draft_model).put(put_draft_model),
        )
        .route(&format!("{draft}/relations"), put(put_draft_relations))
        .route(&format!("{draft}/details"), put(put_draft_details))
        .route("/metrics", post(upload_metrics))
        .route("/search", get(search))
        .route("/grid", get(grid))
        .route("/notifications", get(notifications))
        .route(
            "/notifications/{seq}/acknowledge",
            post(acknowledge_notification),
        )
        .fallback(no_route)
        .with_state(vault)
}

pub(crate) async fn no_route() -> ApiError {
    ApiError::not_found("no such route")
}

// ---- extraction helpers ----------------------------------------------------

/// The user owning the bearer token.
pub(crate) struct Caller(User);

impl FromRequestParts<AppState> for Caller {
    type Rejection = ApiError;

    async fn from_request_parts(
        parts: &mut Parts,
        vault: &AppState,
    ) -> Result<Self, Self::Rejection> {
        let token = parts
            .headers
            .get(header::AUTHORIZATION)
            .and_then(|h| h.to_str().ok())
            .and_then(|h| h.strip_prefix("Bearer "))
            .map(str::trim)
            .ok_or(Error::InvalidToken)?;
        Ok(Caller(vault.authenticate(token)?))
    }
}

fn json_body<T: DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::validation(format!("invalid request body: {e}")))
}

fn entry_id(raw: &str) -> ApiResult<EntryId> {
    raw.parse()
        .map_err(|_| ApiError::not_found(format!("entry {raw}")))
}

fn version_ref(id: &str, variant: String, n: &str) -> ApiResult<VersionRef> {
    let n: u32 = n
        .parse()
        .map_err(|_| ApiError::not_found(format!("version {n}")))?;
    Ok(VersionRef::new(entry_id(id)?, variant, n))
}

fn xml(doc: &ModelDocument) -> ApiResult<Response> {
    let bytes = serialize_model(doc)?;
    Ok(([(header::CONTENT_TYPE, CONTENT_TYPE)], bytes).into_response())
}

fn model_or_none(body: &[u8]) -> ApiResult<Option<ModelDocument>> {
    if body.iter().all(u8::is_ascii_whitespace) {
        Ok(None)
    } else {
        Ok(Some(parse_model(body)?))
    }
}

/// Runs a vault call off the async executor; mutations fsync.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> archlib_core::Result<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
        .map_err(ApiError::from)
}

fn created<T: serde::Serialize>(value: T) -> Response {
    (StatusCode::CREATED, Json(value)).into_response()
}

fn with_warnings(mut response: Response, warnings: &[String]) -> Response {
    for w in warnings {
        let value = format!("299 archlib \"unknown keyword {}\"", w.replace('"', "'"));
        if let Ok(v) = HeaderValue::from_str(&value) {
            response.headers_mut().append(header::WARNING, v);
        }
    }
    response
}

struct Paging {
    offset: usize,
    limit: usize,
}

impl Paging {
    fn take(&mut self, key: &str, value: &str) -> ApiResult<bool> {
        let parse = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| ApiError::validation(format!("{key} must be a non-negative integer")))
        };
        match key {
            "offset" => self.offset = parse(value)?,
            "limit" => self.limit = parse(value)?.clamp(1, MAX_LIMIT),
            _ => return Ok(false),
        }
        Ok(true)
    }
}

impl Default for Paging {
    fn default() -> Self {
        Self {
            offset: 0,
            limit: DEFAULT_LIMIT,
        }
    }
}

fn filter_param(filter: &mut EntryFilter, key: &str, value: &str) -> ApiResult<bool> {
    match key {
        "category" => filter.category = Some(value.parse().map_err(ApiError::validation)?),
        "layer" => filter.layer = Some(value.to_string()),
        "state" => {
            filter.state = Some(
                value
                    .parse::<LifecycleState>()
                    .map_err(ApiError::validation)?,
            )
        }
        _ => return Ok(false),
    }
    Ok(true)
}

// ---- users ---------------------------------------------------------------

async fn me(Caller(user): Caller) -> Json<MeView> {
    Json(MeView::from(&user))
}

async fn permissions(
    State(vault): State<AppState>,
    Caller(user): Caller,
    Path(id): Path<String>,
) -> ApiResult<Json<PermissionsView>> {
    let id = entry_id(&id)?;
    let decisions = Action::ALL
        .into_iter()
        .map(|a| vault.authorize(&user.user_id, a, Some(&id)))
        .collect::<archlib_core::Result<Vec<_>>>()?;
    Ok(Json(PermissionsView {
        user_id: user.user_id,
        entry: id,
        decisions,
    }))
}

// ---- entries -------------------------------------------------------------

async fn list_entries(
    State(vault): State<AppState>,
    Query(params): Query<Vec<(String, String)>>,
) -> ApiResult<Json<Page<EntryMaster>>> {
    let mut filter = EntryFilter::default();
    let mut paging = Paging::default();
    for (k, v) in &params {
        if !(filter_param(&mut filter, k, v)? || paging.take(k, v)?) {
            return Err(ApiError::validation(format!("unknown parameter {k}")));
        }
    }
    Ok(Json(Page::slice(
        vault.list_entries(&filter),
        paging.offset,
        paging.limit,
    )))
}

async fn create_entry(
    State(vault): State<AppState>,
    Caller(user): Caller,
    body: Bytes,
) -> ApiResult<Response> {
    let req: CreateEntryRequest = json_body(&body)?;
    let model = parse_model(req.model.as_bytes())?;
    let warnings = vault.keyword_warnings(&req.entry.keywords);
    let v = vault.clone();
    let view = blocking(move || {
        let master = v.create_entry(req.entry, model, &user.user_id)?;
        v.get_entry(&master.id).map(|e| EntryView::from(&e))
    })
    .await?;
    Ok(with_warnings(created(view), &warnings))
}

async fn create_composite(
    State(vault): State<AppState>,
    Caller(user): Caller,
    body: Bytes,
) -> ApiResult<Response> {
    let req: CreateCompositeRequest = json_body(&body)?;
    let shell = req
        .parent_model
        .as_deref()
        .map(|m| parse_model(m.as_bytes()))
        .transpose()?;
    let warnings = vault.keyword_warnings(&req.entry.keywords);
    let v = vault.clone();
    let view = blocking(move || {
        let master = v.create_composite(req.entry, req.relations, shell, &user.user_id)?;
        v.get_entry(&master.id).map(|e| EntryView::from(&e))
    })
    .await?;
    Ok(with_warnings(created(view), &warnings))
}

async fn get_entry(
    State(vault): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<EntryView>> {
    let entry = vault.get_entry(&entry_id(&id)?)?;
    Ok(Json(EntryView::from(&entry)))
}

async fn new_variant(
    State(vault): State<AppState>,
    Caller(user): Caller,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let id = entry_id(&id)?;
    let req: NewVariantRequest = json_body(&body)?;
    let variant = blocking(move || {
        vault.new_variant(
            &id,
            &req.name,
            &req.from_variant,
            req.from_version,
            &user.user_id,
        )
    })
    .await?;
    Ok(created(crate::views::VariantView::from(&variant)))
}

async fn new_version(
    State(vault): State<AppState>,
    Caller(user): Caller,
    Path((id, variant)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Response> {
    let id = entry_id(&id)?;
    let model = model_or_none(&body)?;
    let version = blocking(move || vault.new_version(&id, &variant, model, &user.user_id)).await?;
    Ok(created(version))
}

async fn get_version(
    State(vault): State<AppState>,
    Path((id, variant, n)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    let r = version_ref(&id, variant, &n)?;
    Ok(Json(vault.get_version(&r)?).into_response())
}

async fn version_model(
    State(vault): State<AppState>,
    Path((id, variant, n)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    let r = version_ref(&id, variant, &n)?;
    let model = vault
        .get_version(&r)?
        .model
        .ok_or_else(|| ApiError::not_found(format!("version {r} has no stored model")))?;
    xml(&model)
}

async fn resolved_model(
    State(vault): State<AppState>,
    Path((id, variant, n)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    let r = version_ref(&id, variant, &n)?;
    xml(&vault.resolve_composite(&r)?)
}

/// Metrics of a stored version; composites are scored over their
/// flattened model.
async fn version_metrics(
    State(vault): State<AppState>,
    Path((id, variant, n)): Path<(String, String, String)>,
) -> ApiResult<Json<MetricsReport>> {
    let r = version_ref(&id, variant, &n)?;
    let snapshot = vault.snapshot();
    let doc = if snapshot.entry(&r.entry)?.master.is_composite {
        snapshot.resolve_composite(&r)?
    } else {
        snapshot
            .version(&r)?
            .model
            .clone()
            .ok_or_else(|| ApiError::not_found(format!("version {r} has no stored model")))?
    };
    Ok(Json(MetricsReport::of(&doc)))
}

async fn upload_metrics(body: Bytes) -> ApiResult<Json<MetricsReport>> {
    Ok(Json(MetricsReport::of(&parse_model(&body)?)))
}

// ---- life-cycle ------------------------------------------------------------

async fn transition(
    vault: AppState,
    user: User,
    id: String,
    variant: String,
    n: String,
    action: TransitionAction,
) -> ApiResult<Response> {
    let r = version_ref(&id, variant, &n)?;
    let outcome = blocking(move || vault.transition(&r, action, &user.user_id)).await?;
    Ok(Json(outcome).into_response())
}

async fn release(
    State(v): State<AppState>,
    Caller(u): Caller,
    Path((id, variant, n)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    transition(v, u, id, variant, n, TransitionAction::Release).await
}

async fn implement(
    State(v): State<AppState>,
    Caller(u): Caller,
    Path((id, variant, n)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    transition(v, u, id, variant, n, TransitionAction::Implement).await
}

async fn deprecate(
    State(v): State<AppState>,
    Caller(u): Caller,
    Path((id, variant, n)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    transition(v, u, id, variant, n, TransitionAction::Deprecate).await
}

async fn acknowledge(
    State(vault): State<AppState>,
    Caller(user): Caller,
    Path((id, variant, n)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    let r = version_ref(&id, variant, &n)?;
    let status = blocking(move || vault.acknowledge_check(&r, &user.user_id)).await?;
    Ok(Json(status).into_response())
}

async fn list_feedback(
    State(vault): State<AppState>,
    Path((id, variant, n)): Path<(String, String, String)>,
) -> ApiResult<Response> {
    let r = version_ref(&id, variant, &n)?;
    Ok(Json(vault.feedback(&r)?).into_response())
}

async fn add_feedback(
    State(vault): State<AppState>,
    Caller(user): Caller,
    Path((id, variant, n)): Path<(String, String, String)>,
    body: Bytes,
) -> ApiResult<Response> {
    let r = version_ref(&id, variant, &n)?;
    let req: FeedbackRequest = json_body(&body)?;
    let comment = blocking(move || vault.add_feedback(&r, &req.text, &user.user_id)).await?;
    Ok(created(comment))
}

// ---- drafts ----------------------------------------------------------------

async fn draft_model(
    State(vault): State<AppState>,
    Path((id, variant)): Path<(String, String)>,
) -> ApiResult<Response> {
    let id = entry_id(&id)?;
    let snapshot = vault.snapshot();
    let latest = snapshot
        .variant(&id, &variant)?
        .latest()
        .filter(|v| v.is_draft())
        .ok_or_else(|| ApiError::not_found(format!("open draft of {id}:{variant}")))?;
    let model = latest.model.as_ref().ok_or_else(|| {
        ApiError::not_found(format!("draft of {id}:{variant} has no stored model"))
    })?;
    xml(model)
}

async fn put_draft_model(
    State(vault): State<AppState>,
    Caller(user): Caller,
    Path((id, variant)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Response> {
    let id = entry_id(&id)?;
    let model = parse_model(&body)?;
    let version =
        blocking(move || vault.put_draft_model(&id, &variant, model, &user.user_id)).await?;
    Ok(Json(version).into_response())
}

async fn put_draft_relations(
    State(vault): State<AppState>,
    Caller(user): Caller,
    Path((id, variant)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Response> {
    let id = entry_id(&id)?;
    let relations = json_body(&body)?;
    let version =
        blocking(move || vault.set_draft_relations(&id, &variant, relations, &user.user_id))
            .await?;
    Ok(Json(version).into_response())
}

async fn put_draft_details(
    State(vault): State<AppState>,
    Caller(user): Caller,
    Path((id, variant)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Response> {
    let id = entry_id(&id)?;
    let req: DraftDetailsRequest = json_body(&body)?;
    let version = blocking(move || {
        vault.update_draft_details(
            &id,
            &variant,
            req.optional_info,
            req.conditions,
            &user.user_id,
        )
    })
    .await?;
    Ok(Json(version).into_response())
}

// ---- discovery -------------------------------------------------------------

/// `term` and `keyword` may repeat; `q` is split into terms.
async fn search(
    State(vault): State<AppState>,
    Query(params): Query<Vec<(String, String)>>,
) -> ApiResult<Json<Page<SearchHit>>> {
    let mut query = SearchQuery::default();
    let mut filter = EntryFilter::default();
    let mut paging = Paging::default();
    for (k, v) in &params {
        match k.as_str() {
            "term" => query.terms.push(v.clone()),
            "q" => query.terms.extend(SearchQuery::text(v).terms),
            "keyword" => query.keywords.push(v.clone()),
            _ if filter_param(&mut filter, k, v)? || paging.take(k, v)? => {}
            _ => return Err(ApiError::validation(format!("unknown parameter {k}"))),
        }
    }
    query.category = filter.category;
    query.layer = filter.layer;
    query.state = filter.state;
    let hits = vault.search(&query)?;
    Ok(Json(Page::slice(hits, paging.offset, paging.limit)))
}

async fn grid(State(vault): State<AppState>) -> Response {
    Json(vault.overview_grid()).into_response()
}

// ---- notifications ---------------------------------------------------------

async fn notifications(State(vault): State<AppState>, Caller(user): Caller) -> Response {
    Json(vault.list_notifications(&user.user_id)).into_response()
}

/// Acknowledges the check behind one of the caller's notifications.
async fn acknowledge_notification(
    State(vault): State<AppState>,
    Caller(user): Caller,
    Path(seq): Path<String>,
) -> ApiResult<Response> {
    let note = seq
        .parse::<u64>()
        .ok()
        .and_then(|seq| {
            vault
                .list_notifications(&user.user_id)
                .into_iter()
                .find(|n| n.seq == seq)
        })
        .ok_or_else(|| ApiError::not_found(format!("notification {seq}")))?;
    let status = blocking(move || vault.acknowledge_check(&note.affected, &user.user_id)).await?;
    Ok(Json(status).into_response())
}
