//! WebSocket transport for [`ProtocolSession`](crate::wire::ProtocolSession).

use std::io;
use std::net::SocketAddr;
use std::sync::Arc;

use futures_util::{SinkExt, StreamExt};
use tokio::net::{TcpListener, TcpStream};
use tokio_tungstenite::tungstenite::Message;

use crate::wire::{ProtocolSession, ReferenceStore, WireMessage, BAD_MESSAGE};

pub const DEFAULT_PORT: u16 = 8765;

/// Accepts connections forever, one task per session.
pub async fn serve(listener: TcpListener, store: Arc<dyn ReferenceStore>) -> io::Result<()> {
    loop {
        let (stream, peer) = listener.accept().await?;
        let store = Arc::clone(&store);
        tokio::spawn(async move {
            if let Err(e) = handle_connection(stream, peer, store.as_ref()).await {
                log::warn!("{peer}: {e}");
            }
        });
    }
}

async fn handle_connection(
    stream: TcpStream,
    peer: SocketAddr,
    store: &dyn ReferenceStore,
) -> Result<(), tokio_tungstenite::tungstenite::Error> {
    let mut ws = tokio_tungstenite::accept_async(stream).await?;
    log::info!("{peer}: session opened");
    let mut session = ProtocolSession::new(store);
    while let Some(msg) = ws.next().await {
        let reply = match msg? {
            Message::Text(text) => session.on_text(text.as_str()),
            Message::Binary(_) => {
                ws.send(Message::text(WireMessage::error(BAD_MESSAGE, "binary messages are not supported").encode()))
                    .await?;
                continue;
            }
            Message::Close(_) => break,
            _ => continue,
        };
        for m in reply.messages {
            ws.send(Message::text(m.encode())).await?;
        }
        if reply.close {
            ws.close(None).await?;
            log::info!("{peer}: session closed");
            return Ok(());
        }
    }
    // peer hung up without a close message; the report is best effort
    if let Some(report) = session.on_disconnect() {
        let _ = ws.send(Message::text(report.encode())).await;
    }
    log::info!("{peer}: connection dropped");
    Ok(())
}
