# Хранилище канонических форм
# Canonical-form store for reduction search and skeleton enumeration

import json
import logging
import threading
from datetime import datetime
from typing import Any, Dict, List, Optional

from sqlalchemy import Boolean, DateTime, Integer, LargeBinary, String, Text, create_engine, func, select
from sqlalchemy.exc import IntegrityError, SQLAlchemyError
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, sessionmaker

from canonical import form_digest
from config import StoreConfig

logger = logging.getLogger(__name__)


class Base(DeclarativeBase):
    pass


class CanonicalFormRecord(Base):
    """Состояние поиска, найденное один раз"""
    __tablename__ = 'canonical_forms'

    # Первичный ключ
    id: Mapped[int] = mapped_column(Integer, primary_key=True)
    # SHA-256 канонической формы
    digest: Mapped[str] = mapped_column(String(64), unique=True, nullable=False, index=True)
    form: Mapped[bytes] = mapped_column(LargeBinary, nullable=False)
    # Глубина BFS, на которой состояние найдено впервые
    depth: Mapped[int] = mapped_column(Integer, default=0)
    complexity_w: Mapped[int] = mapped_column(Integer, default=0)
    complexity_f: Mapped[int] = mapped_column(Integer, default=0)
    created_at: Mapped[datetime] = mapped_column(DateTime(timezone=True), server_default=func.now())

    def __repr__(self):
        return f'<CanonicalForm {self.digest[:12]} depth={self.depth}>'


class SkeletonRecord(Base):
    """Класс скелета из перечисления"""
    __tablename__ = 'enumerated_skeletons'

    id: Mapped[int] = mapped_column(Integer, primary_key=True)
    digest: Mapped[str] = mapped_column(String(64), unique=True, nullable=False, index=True)
    white: Mapped[int] = mapped_column(Integer, nullable=False)
    black: Mapped[int] = mapped_column(Integer, nullable=False)
    loop_free: Mapped[bool] = mapped_column(Boolean, default=True)
    # Идентификатор образца из каталога или 'other'
    tag: Mapped[str] = mapped_column(String(64), default='other')
    # Диаграмма скелета в формате JSON
    chart_json: Mapped[str] = mapped_column(Text, nullable=False)
    created_at: Mapped[datetime] = mapped_column(DateTime(timezone=True), server_default=func.now())

    def __repr__(self):
        return f'<Skeleton w={self.white} b={self.black} {self.tag}>'


class StateStore:
    """Set of canonical forms with atomic insert-if-absent"""

    def __init__(self, url: Optional[str] = None, echo: Optional[bool] = None):
        self.url = url or StoreConfig.STORE_URL
        echo = StoreConfig.ECHO if echo is None else echo
        self.engine = create_engine(self.url, echo=echo, **StoreConfig.get_engine_options(self.url))
        Base.metadata.create_all(self.engine)
        self.Session = sessionmaker(bind=self.engine, expire_on_commit=False)
        self._lock = threading.Lock()
        logger.debug(f"State store ready at {self.url}")

    def add_if_absent(self, form: bytes, depth: int = 0, w: int = 0, f: int = 0) -> bool:
        """
        Record a canonical form unless it is already present.

        Returns:
            True when the form was new
        """
        record = CanonicalFormRecord(digest=form_digest(form), form=form, depth=depth,
                                     complexity_w=w, complexity_f=f)
        with self._lock, self.Session() as session:
            try:
                session.add(record)
                session.commit()
                return True
            except IntegrityError:
                session.rollback()
                return False
            except SQLAlchemyError as e:
                session.rollback()
                logger.error(f"Error storing canonical form: {str(e)}")
                raise

    def contains(self, form: bytes) -> bool:
        with self.Session() as session:
            stmt = select(CanonicalFormRecord.id).where(CanonicalFormRecord.digest == form_digest(form))
            return session.execute(stmt).first() is not None

    def depth_of(self, form: bytes) -> Optional[int]:
        with self.Session() as session:
            stmt = select(CanonicalFormRecord.depth).where(CanonicalFormRecord.digest == form_digest(form))
            row = session.execute(stmt).first()
            return None if row is None else row[0]

    def count(self) -> int:
        with self.Session() as session:
            return session.execute(select(func.count(CanonicalFormRecord.id))).scalar_one()

    def clear(self):
        with self._lock, self.Session() as session:
            try:
                session.query(CanonicalFormRecord).delete()
                session.commit()
            except SQLAlchemyError as e:
                session.rollback()
                logger.error(f"Error clearing state store: {str(e)}")
                raise

    def add_skeleton(self, digest: str, white: int, black: int, loop_free: bool, tag: str,
                     chart_doc: Dict[str, Any]) -> bool:
        record = SkeletonRecord(digest=digest, white=white, black=black, loop_free=loop_free, tag=tag,
                                chart_json=json.dumps(chart_doc, sort_keys=True))
        with self._lock, self.Session() as session:
            try:
                session.add(record)
                session.commit()
                return True
            except IntegrityError:
                session.rollback()
                return False
            except SQLAlchemyError as e:
                session.rollback()
                logger.error(f"Error storing skeleton: {str(e)}")
                raise

    def skeletons(self, white: Optional[int] = None) -> List[SkeletonRecord]:
        with self.Session() as session:
            stmt = select(SkeletonRecord).order_by(SkeletonRecord.white, SkeletonRecord.black,
                                                   SkeletonRecord.digest)
            if white is not None:
                stmt = stmt.where(SkeletonRecord.white == white)
            return list(session.execute(stmt).scalars())

    def close(self):
        self.engine.dispose()
