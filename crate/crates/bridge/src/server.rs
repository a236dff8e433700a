//! HTTP and WebSocket front end. One actor task owns the [`DeviceHub`];
//! connection handlers only enqueue inbound messages and forward
//! broadcasts.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::http::header;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use tokio::net::TcpListener;
use tokio::sync::{broadcast, mpsc, watch};
use tokio::time::{interval, Instant, MissedTickBehavior};
use tower_http::services::ServeDir;

use crate::hub::{DeviceHub, Outbound, Snapshot};
use crate::protocol::{parse_inbound, InboundMsg};

const PLACEHOLDER_PAGE: &str = "<!doctype html>\n<title>touchboard bridge</title>\n\
<p>touchboard bridge is running. Connect a client to <code>/ws</code>, or start the \
bridge with <code>--static-dir</code> to serve the UI here.</p>\n";

#[derive(Debug, Clone)]
pub struct BridgeConfig {
    /// Wall-clock length of one device tick.
    pub step_interval: Duration,
    /// Lower bound between two published frames.
    pub min_frame_interval: Duration,
    pub static_dir: Option<PathBuf>,
    pub queue_depth: usize,
    pub broadcast_depth: usize,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        BridgeConfig {
            step_interval: Duration::from_millis(5),
            min_frame_interval: Duration::from_millis(34),
            static_dir: None,
            queue_depth: 1024,
            broadcast_depth: 64,
        }
    }
}

#[derive(Clone)]
struct AppState {
    inbound: mpsc::Sender<InboundMsg>,
    outbound: broadcast::Sender<Outbound>,
    snapshot: watch::Receiver<Snapshot>,
    clients: Arc<AtomicUsize>,
}

/// Steps the hub on a fixed cadence. Every queued message is applied, one
/// tick is closed, and at most one publish happens per frame interval.
async fn device_actor(
    mut hub: DeviceHub,
    config: BridgeConfig,
    mut inbound: mpsc::Receiver<InboundMsg>,
    outbound: broadcast::Sender<Outbound>,
    snapshot: watch::Sender<Snapshot>,
) {
    let mut ticker = interval(config.step_interval);
    ticker.set_missed_tick_behavior(MissedTickBehavior::Delay);
    let mut last_publish: Option<Instant> = None;
    loop {
        ticker.tick().await;
        loop {
            match inbound.try_recv() {
                Ok(msg) => hub.apply(&msg),
                Err(mpsc::error::TryRecvError::Empty) => break,
                Err(mpsc::error::TryRecvError::Disconnected) => return,
            }
        }
        hub.tick();
        let due = last_publish.is_none_or(|t| t.elapsed() >= config.min_frame_interval);
        if due {
            let msgs = hub.publish();
            if !msgs.is_empty() {
                last_publish = Some(Instant::now());
                snapshot.send_replace(hub.snapshot().clone());
                for m in msgs {
                    // no subscribers is fine
                    let _ = outbound.send(m);
                }
            } else {
                snapshot.send_modify(|s| s.tick = hub.snapshot().tick);
            }
        }
    }
}

pub fn router(config: &BridgeConfig) -> Router {
    let (in_tx, in_rx) = mpsc::channel(config.queue_depth);
    let (out_tx, _) = broadcast::channel(config.broadcast_depth);
    let (snap_tx, snap_rx) = watch::channel(Snapshot::default());
    tokio::spawn(device_actor(
        DeviceHub::default(),
        config.clone(),
        in_rx,
        out_tx.clone(),
        snap_tx,
    ));
    let state = AppState {
        inbound: in_tx,
        outbound: out_tx,
        snapshot: snap_rx,
        clients: Arc::new(AtomicUsize::new(0)),
    };
    let app = Router::new()
        .route("/ws", get(ws_upgrade))
        .route("/healthz", get(healthz))
        .route("/snapshot.ppm", get(snapshot_ppm));
    let app = match &config.static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.route("/", get(|| async { Html(PLACEHOLDER_PAGE) })),
    };
    app.with_state(state)
}

pub async fn serve(listener: TcpListener, config: BridgeConfig) -> std::io::Result<()> {
    axum::serve(listener, router(&config)).await
}

async fn healthz(State(st): State<AppState>) -> Json<serde_json::Value> {
    let snap = st.snapshot.borrow().clone();
    let status = snap
        .status
        .as_deref()
        .and_then(|s| serde_json::from_str::<serde_json::Value>(s).ok())
        .unwrap_or_default();
    Json(serde_json::json!({
        "status": "ok",
        "seq": snap.seq(),
        "tick": snap.tick,
        "clients": st.clients.load(Ordering::Relaxed),
        "power": status["power"],
    }))
}

/// Latest published frame as PPM; its seq is in `x-frame-seq`.
async fn snapshot_ppm(State(st): State<AppState>) -> Response {
    let frame = st.snapshot.borrow().frame.clone();
    match frame {
        Some(f) => (
            [
                (header::CONTENT_TYPE, "image/x-portable-pixmap".to_string()),
                (
                    header::HeaderName::from_static("x-frame-seq"),
                    f.seq.to_string(),
                ),
            ],
            f.to_ppm(),
        )
            .into_response(),
        None => (axum::http::StatusCode::SERVICE_UNAVAILABLE, "no frame yet").into_response(),
    }
}

async fn ws_upgrade(ws: WebSocketUpgrade, State(st): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| client(socket, st))
}

fn to_message(o: &Outbound) -> Message {
    match o {
        Outbound::Frame(f) => Message::Binary(f.bytes.to_vec().into()),
        Outbound::Status(s) | Outbound::SevenSeg(s) => Message::Text(s.to_string().into()),
    }
}

async fn client(socket: WebSocket, st: AppState) {
    st.clients.fetch_add(1, Ordering::Relaxed);
    pump(socket, &st).await;
    st.clients.fetch_sub(1, Ordering::Relaxed);
}

/// Runs one connection until either side goes away.
async fn pump(mut socket: WebSocket, st: &AppState) {
    // subscribe before reading the snapshot so nothing falls in between
    let mut rx = st.outbound.subscribe();
    let snap = st.snapshot.borrow().clone();
    let mut sent_seq = snap.seq();
    for m in snap.messages() {
        if socket.send(to_message(&m)).await.is_err() {
            return;
        }
    }
    loop {
        tokio::select! {
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Text(text))) => match parse_inbound(&text) {
                    Ok(msg) => {
                        if st.inbound.send(msg).await.is_err() {
                            break;
                        }
                    }
                    Err(e) => {
                        if socket.send(Message::Text(e.to_json().into())).await.is_err() {
                            break;
                        }
                    }
                },
                Some(Ok(Message::Binary(_))) => {
                    let e = crate::protocol::ProtocolError {
                        field: "message".into(),
                        message: "binary messages are not accepted".into(),
                    };
                    if socket.send(Message::Text(e.to_json().into())).await.is_err() {
                        break;
                    }
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                Some(Ok(_)) => {}
            },
            out = rx.recv() => match out {
                Ok(Outbound::Frame(f)) if f.seq <= sent_seq => {}
                Ok(o) => {
                    if let Outbound::Frame(f) = &o {
                        sent_seq = f.seq;
                    }
                    if socket.send(to_message(&o)).await.is_err() {
                        break;
                    }
                }
                // a slow client skips ahead; the device never waits for it
                Err(broadcast::error::RecvError::Lagged(_)) => {}
                Err(broadcast::error::RecvError::Closed) => break,
            },
        }
    }
}
