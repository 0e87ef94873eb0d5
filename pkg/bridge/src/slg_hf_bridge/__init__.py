"""Stdio backend bridging a local Hugging Face seq2seq model.

Speaks the decode engine's newline-delimited JSON protocol on standard
input/output, answering each `next` request with the model's top-k
next-token candidates as tokenizer surface strings.
"""

__version__ = "0.1.0"

from .server import BridgeConfig, serve

__all__ = ["BridgeConfig", "serve", "__version__"]
