//! HTTP adapter around [`Service`]: every request is handed to the router
//! unchanged and its answer written back as JSON or plain text.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, Method as HttpMethod, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::Router;
use scitype_core::query::{ApiRequest, ApiResponse, Body, Method, Service};

use crate::error::CliError;

pub fn to_api_request(method: &HttpMethod, uri: &Uri, body: Bytes) -> ApiRequest {
    ApiRequest {
        method: Method::parse(method.as_str()),
        path: uri.path().to_owned(),
        query: uri.query().unwrap_or_default().to_owned(),
        body: body.to_vec(),
    }
}

pub fn to_http(resp: ApiResponse) -> Response {
    let status = StatusCode::from_u16(resp.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let (content_type, bytes) = match resp.body {
        Body::Json(v) => ("application/json", serde_json::to_vec(&v).expect("serializable")),
        Body::Text(t) => ("text/plain; charset=utf-8", t.into_bytes()),
    };
    let mut response = (status, bytes).into_response();
    response.headers_mut().insert(header::CONTENT_TYPE, HeaderValue::from_static(content_type));
    response
}

async fn dispatch(State(service): State<Arc<Service>>, method: HttpMethod, uri: Uri, body: Bytes) -> Response {
    let request = to_api_request(&method, &uri, body);
    // Edits fsync and retraining is CPU-bound; keep both off the async workers.
    match tokio::task::spawn_blocking(move || service.handle(&request)).await {
        Ok(resp) => to_http(resp),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, format!("handler panicked: {e}")).into_response(),
    }
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new().fallback(dispatch).with_state(service)
}

pub async fn serve(service: Service, bind: SocketAddr) -> Result<(), CliError> {
    let listener = tokio::net::TcpListener::bind(bind)
        .await
        .map_err(|e| CliError::Failed(format!("cannot bind {bind}: {e}")))?;
    let local = listener.local_addr().map_err(|e| CliError::io("listener", e))?;
    println!("listening on http://{local}");
    axum::serve(listener, router(Arc::new(service)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| CliError::Failed(format!("server error: {e}")))
}
