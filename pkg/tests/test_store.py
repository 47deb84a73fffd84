import threading
from datetime import datetime

from sqlalchemy import select

from store import CanonicalFormRecord, StateStore


def test_insert_if_absent():
    store = StateStore()
    assert store.add_if_absent(b'form-a', depth=1, w=3, f=0)
    assert not store.add_if_absent(b'form-a', depth=2)
    assert store.contains(b'form-a')
    assert not store.contains(b'form-b')
    assert store.depth_of(b'form-a') == 1
    assert store.depth_of(b'form-b') is None
    assert store.count() == 1
    store.clear()
    assert store.count() == 0
    store.close()


def test_concurrent_inserts_admit_one_winner():
    store = StateStore()
    wins = []

    def worker():
        wins.append(store.add_if_absent(b'shared'))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert wins.count(True) == 1
    assert store.count() == 1
    store.close()


def test_skeleton_records(tmp_path):
    store = StateStore(f"sqlite:///{tmp_path / 'forms.db'}")
    assert store.add_skeleton('abc', 2, 0, True, 'THETA', {'n': 2})
    assert not store.add_skeleton('abc', 2, 0, True, 'THETA', {'n': 2})
    records = store.skeletons(white=2)
    assert [r.tag for r in records] == ['THETA']
    assert store.skeletons(white=3) == []
    store.close()


def test_records_are_stamped_by_the_database():
    store = StateStore()
    store.add_if_absent(b'stamped')
    store.add_skeleton('def', 2, 0, True, 'THETA', {'n': 2})
    with store.Session() as session:
        form = session.execute(select(CanonicalFormRecord)).scalar_one()
    (skeleton,) = store.skeletons()
    assert isinstance(form.created_at, datetime)
    assert isinstance(skeleton.created_at, datetime)
    assert CanonicalFormRecord.__table__.c.created_at.server_default is not None
    store.close()
