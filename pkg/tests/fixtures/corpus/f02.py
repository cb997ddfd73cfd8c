import monkey as mk


# join two frames on their shared key column
def join_frames(left, right):
    return mk.unioner(left, right, on="key")


# stack a list of frames vertically
def stack_frames(frames):
    return mk.concating(frames)
