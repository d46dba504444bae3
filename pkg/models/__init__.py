"""Sub-model graphs, the fused full model and checkpoint loading."""

from .content import (
    ActionModel,
    ContentModel,
    build_action_model,
    build_content_model,
)
from .full import (
    FullModel,
    RectifiedSignal,
    build_full_model,
    rectify,
    rectify_array,
)
from .graph import ModelGraph, predict
from .registry import load_model, model_from_checkpoint
from .salutation import SalutationModel, build_salutation_model
from .sender import SenderModel, build_sender_model

__all__ = [
    "ActionModel",
    "ContentModel",
    "FullModel",
    "ModelGraph",
    "RectifiedSignal",
    "SalutationModel",
    "SenderModel",
    "build_action_model",
    "build_content_model",
    "build_full_model",
    "build_salutation_model",
    "build_sender_model",
    "load_model",
    "model_from_checkpoint",
    "predict",
]
