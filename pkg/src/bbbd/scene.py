from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Optional

from .detector import Instance
from .evaluation import GroundTruth


@dataclass(eq=False)
class Scene:
    """All instances of one image, optionally with ground truth.

    ``gt`` rows and columns follow the order of ``instances``.
    """

    image_id: Hashable
    width: int
    height: int
    instances: list[Instance] = field(default_factory=list)
    gt: Optional[GroundTruth] = None

    @property
    def ids(self) -> list:
        return [inst.id for inst in self.instances]

    def __len__(self):
        return len(self.instances)
